#include "qctl/objective.hpp"

#include <cassert>
#include <cmath>

#include "qctl/errors.hpp"

namespace qctl {

Objective::Objective(HermitianOperator terminal_op, double beta_, std::optional<double> cap)
    : terminal(std::move(terminal_op)), beta(beta_), energy_cap(cap) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw InvalidArgument("penalty weight beta must be >= 0");
    }
    if (energy_cap && !(*energy_cap > 0.0)) {
        throw InvalidArgument("energy cap must be positive");
    }
}

bool Objective::terminal_is_psd() const { return terminal.min_eigenvalue() >= -kPsdTol; }

ControlProblem::ControlProblem(BilinearSystem sys, Objective obj, CVector psi)
    : system(std::move(sys)), objective(std::move(obj)), psi0(std::move(psi)) {
    if (objective.terminal.dim() != system.dim() || psi0.size() != system.dim()) {
        throw DimensionMismatch("objective, initial state and system dimensions differ");
    }
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-12) {
        throw InvalidArgument("psi0 not normalized");
    }
}

ControlProblem ControlProblem::with_beta(double beta) const {
    ControlProblem copy = *this;
    copy.objective = Objective(objective.terminal, beta, objective.energy_cap);
    return copy;
}

HermitianOperator projector_from_states(std::span<const CVector> states, Eigen::Index dim) {
    CMatrix l = CMatrix::Zero(dim, dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != dim) {
            throw DimensionMismatch("target state dimension differs from the system");
        }
        for (std::size_t j = 0; j <= i; ++j) {
            const Complex g = states[j].dot(states[i]);
            const double expected = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g - expected));
        }
        l += states[i] * states[i].adjoint();
    }
    if (worst > 1e-10) {
        throw NotOrthonormal(worst);
    }
    // Outer products of the same vector are Hermitian up to rounding.
    l = 0.5 * (l + l.adjoint()).eval();
    return validate_hermitian(std::move(l));
}

HermitianOperator projector_from_indices(std::span<const int> indices, Eigen::Index dim) {
    CMatrix l = CMatrix::Zero(dim, dim);
    for (int i : indices) {
        if (i < 0 || i >= dim) {
            throw InvalidArgument("target state index out of range");
        }
        if (l(i, i) != Complex(0.0)) {
            throw NotOrthonormal(1.0);
        }
        l(i, i) = 1.0;
    }
    return validate_hermitian(std::move(l));
}

bool is_projector(const HermitianOperator& l, double tol) {
    const CMatrix& m = l.matrix();
    return (m * m - m).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator complement(const HermitianOperator& l) {
    if (!is_projector(l)) {
        throw NotProjector("complement requires a projector (L^2 = L)");
    }
    const Eigen::Index n = l.dim();
    return validate_hermitian(CMatrix::Identity(n, n) - l.matrix());
}

double terminal_cost(const HermitianOperator& l, const CVector& psi_T) {
    if (psi_T.size() != l.dim()) {
        throw DimensionMismatch("terminal state dimension differs from L");
    }
    if (std::abs(psi_T.squaredNorm() - 1.0) > kNormTol) {
        throw InvalidArgument("terminal state must have unit norm");
    }
    const Complex expectation = psi_T.dot(l.matrix() * psi_T);
    assert(std::abs(expectation.imag()) <= 1e-10 * std::max(1.0, l.matrix().cwiseAbs().maxCoeff()));
    return -expectation.real();
}

double total_cost(double terminal, double beta, const ControlProgram& ctrl) {
    if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
    return terminal + beta * energy_integral(ctrl);
}

CostBreakdown evaluate(const ControlProblem& problem, const ControlProgram& ctrl,
                       const StateTrajectory& traj) {
    CostBreakdown c;
    c.terminal = terminal_cost(problem.objective.terminal, traj.final_state());
    c.energy = energy_integral(ctrl);
    c.total = c.terminal + problem.objective.beta * c.energy;
    c.max_norm_drift = traj.max_norm_drift;
    return c;
}

CostBreakdown evaluate(const ControlProblem& problem, const ControlProgram& ctrl) {
    return evaluate(problem, ctrl, propagate_forward(problem.system, ctrl, problem.psi0));
}

}  // namespace qctl
