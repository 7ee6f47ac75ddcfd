#pragma once

#include <vector>

#include "qctl/objective.hpp"
#include "qctl/report.hpp"

namespace qctl {

struct LineSearchConfig {
    double eps0 = 1.0;
    double shrink = 0.5;
    int max_trials = 40;

    void validate() const;
};

// dJ/du_k for the piecewise-constant discretization:
//   g_k = -int_{t_k}^{t_{k+1}} K1(t) dt + 2 beta u_k dt.
// The switching function is integrated exactly over each interval in the
// eigenbasis of H(u_k), so g is the exact gradient of the discrete cost; it
// agrees with (-K1(t_k) + 2 beta u_k) dt to first order in dt.
std::vector<double> cost_gradient(const ControlProblem& problem, const ControlProgram& ctrl);

struct GradientStep {
    ControlProgram control;
    IterationReport report;
};

// Projected steepest descent with backtracking:
//   u'_k = clip(u_k - eps * g_k / dt, a, b),  eps in {eps0, eps0*shrink, ...}
// accepting the first eps with J(u') < J(u). Throws NoImprovement.
GradientStep gradient_improve_step(const ControlProblem& problem, const ControlProgram& ctrl,
                                   const LineSearchConfig& cfg = {});

}  // namespace qctl
