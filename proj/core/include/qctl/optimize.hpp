#pragma once

#include <string>
#include <vector>

#include "qctl/gradient.hpp"
#include "qctl/krotov.hpp"
#include "qctl/report.hpp"

namespace qctl {

enum class Method { Krotov, Gradient };

const char* to_string(Method m) noexcept;

struct OptimizerConfig {
    Method method = Method::Krotov;
    int max_iterations = 100;
    double j_tol = 1e-12;     // stop when |J_s - J_{s-1}| < j_tol
    double grad_tol = 1e-10;  // gradient method: stop when the gradient norm drops below
    LineSearchConfig line_search;
    KrotovConfig krotov;
    // On MonotonicityFailure, halve the grid spacing and retry, up to this many times.
    int max_refinements = 0;
    bool record_controls = false;
};

enum class StopReason {
    MaxIterations,
    Converged,         // |dJ| < j_tol
    GradientSmall,     // gradient norm < grad_tol
    NoImprovement,     // line search failed
    MonotonicityFailure,
};

const char* to_string(StopReason r) noexcept;

struct OptimizationResult {
    Method method = Method::Krotov;
    ControlProgram control;
    std::vector<IterationReport> history;  // history[0] is the initial control
    StopReason stop = StopReason::MaxIterations;
    std::string diagnostic;
    int refinements = 0;
    std::vector<std::vector<double>> control_trace;  // per history row, if recorded

    const IterationReport& final_report() const { return history.back(); }
    bool failed() const noexcept {
        return stop == StopReason::NoImprovement || stop == StopReason::MonotonicityFailure;
    }
};

// Iterates the chosen improver from ctrl0. Improver failures end the run
// with the corresponding StopReason instead of propagating.
OptimizationResult optimize(const ControlProblem& problem, const ControlProgram& ctrl0,
                            const OptimizerConfig& cfg);

// Iterations until J first reaches J_0 - fraction * (J_0 - j_reference);
// -1 if it never does.
int iterations_to_fraction(const std::vector<IterationReport>& history, double j_reference,
                           double fraction);

}  // namespace qctl
