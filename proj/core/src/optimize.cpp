#include "qctl/optimize.hpp"

#include <cmath>

#include "qctl/errors.hpp"

namespace qctl {

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::Krotov: return "krotov";
        case Method::Gradient: return "gradient";
    }
    return "unknown";
}

const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::Converged: return "converged";
        case StopReason::GradientSmall: return "gradient_small";
        case StopReason::NoImprovement: return "no_improvement";
        case StopReason::MonotonicityFailure: return "monotonicity_failure";
    }
    return "unknown";
}

namespace {

IterationReport initial_report(const ControlProblem& problem, const ControlProgram& ctrl) {
    const CostBreakdown c = evaluate(problem, ctrl);
    IterationReport r;
    r.terminal = c.terminal;
    r.total = c.total;
    r.energy = c.energy;
    r.max_norm_drift = c.max_norm_drift;
    return r;
}

IterationReport from_krotov(const KrotovStepReport& k) {
    IterationReport r;
    r.terminal = k.i_after;
    r.total = k.j_after;
    r.energy = k.energy_after;
    r.max_norm_drift = k.max_norm_drift;
    r.singular_fraction = k.singular_fraction;
    r.damping = k.damping_used;
    r.damped = k.damping_trials > 0;
    return r;
}

}  // namespace

OptimizationResult optimize(const ControlProblem& problem, const ControlProgram& ctrl0,
                            const OptimizerConfig& cfg) {
    if (cfg.max_iterations < 0) throw InvalidArgument("max_iterations must be >= 0");
    OptimizationResult result{cfg.method, ctrl0, {}, StopReason::MaxIterations, {}, 0, {}};
    result.history.push_back(initial_report(problem, ctrl0));
    auto record = [&] {
        if (cfg.record_controls) {
            const auto u = result.control.values();
            result.control_trace.emplace_back(u.begin(), u.end());
        }
    };
    record();

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const double j_prev = result.history.back().total;
        IterationReport rep;
        try {
            if (cfg.method == Method::Krotov) {
                KrotovStep step = krotov_improve_step(problem, result.control, cfg.krotov);
                rep = from_krotov(step.report);
                result.control = std::move(step.control);
            } else {
                GradientStep step = gradient_improve_step(problem, result.control, cfg.line_search);
                rep = step.report;
                result.control = std::move(step.control);
            }
        } catch (const MonotonicityFailure& e) {
            if (result.refinements < cfg.max_refinements) {
                ++result.refinements;
                result.control = result.control.refined(2);
                --it;
                continue;
            }
            result.stop = StopReason::MonotonicityFailure;
            result.diagnostic = e.what();
            return result;
        } catch (const NoImprovement& e) {
            if (e.gradient_norm() < cfg.grad_tol) {
                result.stop = StopReason::GradientSmall;
            } else {
                result.stop = StopReason::NoImprovement;
                result.diagnostic = e.what();
            }
            return result;
        }
        rep.iteration = it;
        result.history.push_back(rep);
        record();
        if (cfg.method == Method::Gradient && rep.gradient_norm < cfg.grad_tol) {
            result.stop = StopReason::GradientSmall;
            return result;
        }
        if (std::abs(rep.total - j_prev) < cfg.j_tol) {
            result.stop = StopReason::Converged;
            return result;
        }
    }
    return result;
}

int iterations_to_fraction(const std::vector<IterationReport>& history, double j_reference,
                           double fraction) {
    if (history.empty()) return -1;
    const double j0 = history.front().total;
    const double target = j0 - fraction * (j0 - j_reference);
    for (const IterationReport& r : history) {
        if (r.total <= target) return r.iteration;
    }
    return -1;
}

}  // namespace qctl
