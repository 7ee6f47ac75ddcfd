#pragma once

#include <optional>
#include <vector>

#include "qctl/optimize.hpp"

namespace qctl {

struct BudgetConfig {
    double cap_tol = 1e-3;            // relative: |z(T) - cap| <= cap_tol * cap
    int max_bisections = 40;
    int max_ladder = 40;              // beta_0 * 4^j, j < max_ladder
    std::optional<double> beta0;      // unset: 1e-4 |I_0| / max(z_0, tiny)
    double noise_tol = 1e-2;          // relative to cap; tolerated z(beta) non-monotonicity
};

struct BracketPoint {
    double beta = 0.0;
    double energy = 0.0;  // z(T)
};

enum class BudgetStatus {
    Inactive,  // the beta = 0 solution already meets the cap
    Met,       // |z(T) - cap| <= cap_tol * cap
    Feasible,  // bisection exhausted with z(T) < cap
};

const char* to_string(BudgetStatus s) noexcept;

struct BudgetResult {
    double beta_star = 0.0;
    double energy = 0.0;  // z(T) of the returned control
    BudgetStatus status = BudgetStatus::Inactive;
    OptimizationResult inner;
    std::vector<BracketPoint> bracket_history;
};

// Enforces z(T) <= cap by tuning a constant penalty weight beta: solve at
// beta = 0; if the cap is violated, climb a geometric ladder until it holds,
// then bisect (geometrically) until z(T) matches the cap. Each inner run is
// warm-started: ladder rungs from the previous rung, bisection points from
// the over-cap end of the bracket. Throws BracketFailure when z(T)
// is not monotone in beta beyond noise_tol, or when no ladder rung meets
// the cap. Throws InnerFailure when an inner run stops on an improver failure.
BudgetResult optimize_with_cap(const ControlProblem& problem, const ControlProgram& ctrl0,
                               double cap, const OptimizerConfig& inner,
                               const BudgetConfig& cfg = {});

}  // namespace qctl
