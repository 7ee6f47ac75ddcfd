#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "problem.hpp"

namespace qctl::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitValidation = 2,
    kExitImprover = 3,  // MonotonicityFailure / NoImprovement / inner budget failure
    kExitBracket = 4,
    kExitBudget = 5,    // oracle enumeration budget exceeded
};

inline constexpr const char* kCsvHeader = "iter,I,J,energy,norm_drift,singular_fraction";

struct RunOptions {
    std::filesystem::path out_dir = "qctl_out";
    bool trace_controls = false;
    bool refine_on_failure = false;
    bool with_timestamp = true;  // header.timestamp in report JSON
};

// Runs each configured method into out_dir/<method>/ (report.json,
// convergence.csv, optionally controls.csv). With two methods, also writes
// out_dir/comparison.csv.
int run_optimize(const ProblemBundle& bundle, const RunOptions& opts, std::ostream& log);

// Runs both methods concurrently and writes the comparison table.
int run_compare(const ProblemBundle& bundle, const RunOptions& opts, std::ostream& log);

struct OracleOptions {
    std::vector<double> levels;           // default {a, b}
    std::optional<std::size_t> n_steps;   // default: problem grid
    std::optional<std::filesystem::path> method_report;
    std::filesystem::path out_dir = "qctl_out";
    bool with_timestamp = true;
};

int run_oracle(const ProblemBundle& bundle, const OracleOptions& opts, std::ostream& log);

// Prints validation and conditioning diagnostics for the problem.
int run_check(const ProblemBundle& bundle, std::ostream& log);

}  // namespace qctl::cli
