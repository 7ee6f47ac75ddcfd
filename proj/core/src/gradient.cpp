#include "qctl/gradient.hpp"

#include <cmath>

#include "qctl/errors.hpp"

namespace qctl {

void LineSearchConfig::validate() const {
    if (!(eps0 > 0.0)) throw InvalidArgument("line search eps0 must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("line search shrink must be in (0,1)");
    if (max_trials < 1) throw InvalidArgument("line search needs max_trials >= 1");
}

namespace {

// int_0^dt exp(i w s) ds
Complex phase_integral(double omega, double dt) {
    const double x = omega * dt;
    if (std::abs(x) < 1e-3) {
        const Complex ix(0.0, x);
        return dt * (1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0);
    }
    return (std::polar(1.0, x) - 1.0) / Complex(0.0, omega);
}

struct Sweep {
    std::vector<SpectralStep> steps;
    StateTrajectory traj;
};

Sweep forward_with_spectra(const ControlProblem& problem, const ControlProgram& ctrl) {
    const BilinearSystem& sys = problem.system;
    const double dt = ctrl.dt();
    Sweep s;
    s.steps.reserve(ctrl.size());
    s.traj.nodes.reserve(ctrl.size() + 1);
    s.traj.nodes.push_back(problem.psi0);
    double drift = 0.0;
    for (std::size_t k = 0; k < ctrl.size(); ++k) {
        s.steps.emplace_back(sys, ctrl[k]);
        s.traj.nodes.push_back(s.steps.back().propagator(dt) * s.traj.nodes.back());
        drift = std::max(drift, std::abs(s.traj.nodes.back().squaredNorm() - 1.0));
    }
    s.traj.max_norm_drift = drift;
    if (drift > kNormTol) throw NormDrift(drift);
    return s;
}

std::vector<double> gradient_from_sweep(const ControlProblem& problem, const ControlProgram& ctrl,
                                        const Sweep& sweep, const AdjointTrajectory& adj) {
    const double dt = ctrl.dt();
    const double beta = problem.objective.beta;
    const CMatrix& h1 = problem.system.h1().matrix();
    std::vector<double> g(ctrl.size());
    for (std::size_t k = 0; k < ctrl.size(); ++k) {
        const SpectralStep& step = sweep.steps[k];
        const CMatrix& v = step.eigenvectors();
        const Eigen::VectorXd& lambda = step.eigenvalues();
        const CVector c = v.adjoint() * adj.nodes[k];
        const CVector p = v.adjoint() * sweep.traj.nodes[k];
        const CMatrix m = v.adjoint() * h1 * v;
        Complex z = 0.0;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            for (Eigen::Index j = 0; j < lambda.size(); ++j) {
                z += std::conj(c(i)) * m(i, j) * p(j) * phase_integral(lambda(i) - lambda(j), dt);
            }
        }
        // -int K1 dt = -2 Im int <chi, H1 Psi> dt
        g[k] = -2.0 * z.imag() + 2.0 * beta * ctrl[k] * dt;
    }
    return g;
}

double function_norm(const std::vector<double>& g, double dt) {
    double s = 0.0;
    for (double x : g) s += x * x;
    return std::sqrt(s / dt);
}

}  // namespace

std::vector<double> cost_gradient(const ControlProblem& problem, const ControlProgram& ctrl) {
    const Sweep sweep = forward_with_spectra(problem, ctrl);
    const CVector chi_T = problem.objective.terminal.matrix() * sweep.traj.final_state();
    const AdjointTrajectory adj = propagate_backward(problem.system, ctrl, chi_T);
    return gradient_from_sweep(problem, ctrl, sweep, adj);
}

GradientStep gradient_improve_step(const ControlProblem& problem, const ControlProgram& ctrl,
                                   const LineSearchConfig& cfg) {
    cfg.validate();
    const Bounds& bounds = problem.system.bounds();
    if (!ctrl.feasible(bounds)) {
        throw InvalidArgument("gradient step requires a feasible control");
    }
    const Sweep sweep = forward_with_spectra(problem, ctrl);
    const CostBreakdown before = evaluate(problem, ctrl, sweep.traj);
    const CVector chi_T = problem.objective.terminal.matrix() * sweep.traj.final_state();
    const AdjointTrajectory adj = propagate_backward(problem.system, ctrl, chi_T);
    const std::vector<double> g = gradient_from_sweep(problem, ctrl, sweep, adj);

    double max_k1 = 0.0;
    for (double k : k1_profile(adj, sweep.traj, problem.system)) max_k1 = std::max(max_k1, std::abs(k));

    const double dt = ctrl.dt();
    const double grad_norm = function_norm(g, dt);
    double eps = cfg.eps0;
    for (int trial = 1; trial <= cfg.max_trials; ++trial, eps *= cfg.shrink) {
        std::vector<double> u(ctrl.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            u[k] = bounds.clip(ctrl[k] - eps * g[k] / dt);
        }
        ControlProgram candidate(ctrl.horizon(), std::move(u));
        const CostBreakdown after = evaluate(problem, candidate);
        if (after.total < before.total) {
            IterationReport r;
            r.terminal = after.terminal;
            r.total = after.total;
            r.energy = after.energy;
            r.max_norm_drift = after.max_norm_drift;
            r.step = eps;
            r.trials = trial;
            r.gradient_norm = grad_norm;
            r.max_abs_k1 = max_k1;
            return {std::move(candidate), r};
        }
    }
    throw NoImprovement(grad_norm, max_k1, cfg.max_trials);
}

}  // namespace qctl
