#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qctl/errors.hpp"
#include "qctl/optimize.hpp"

namespace qctl::cli {

inline constexpr int kSchemaVersion = 1;

class ParseError : public Error {
public:
    using Error::Error;
};

// Names the offending field, e.g. ValidationError("psi0", "not normalized").
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class InitKind { Constant, Random, Provided };

struct RunConfig {
    std::vector<Method> methods;  // one entry, or both for "both"
    OptimizerConfig optimizer;
    std::optional<double> energy_cap;
    InitKind init = InitKind::Constant;
    std::optional<std::uint64_t> seed;
};

struct ProblemBundle {
    ControlProblem problem;
    ControlProgram initial_control;
    RunConfig run;
    std::string config_echo;  // the input document, re-serialized
    std::vector<std::string> warnings;
};

ProblemBundle parse_problem(const std::filesystem::path& path);
ProblemBundle parse_problem_text(const std::string& text);

// Seeded uniform draws on [a, a + amplitude (b - a)]; identical across platforms.
std::vector<double> random_control_values(std::uint64_t seed, double amplitude, double a,
                                          double b, std::size_t n);

}  // namespace qctl::cli
