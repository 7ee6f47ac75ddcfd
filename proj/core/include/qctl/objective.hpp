#pragma once

#include <optional>
#include <span>

#include "qctl/dynamics.hpp"
#include "qctl/operator.hpp"

namespace qctl {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kProjectorTol = 1e-10;

// Terminal cost I = -Re<Psi(T), L Psi(T)>, plus beta * z(T).
struct Objective {
    HermitianOperator terminal;
    double beta = 0.0;
    std::optional<double> energy_cap;

    Objective(HermitianOperator terminal, double beta = 0.0,
              std::optional<double> energy_cap = std::nullopt);

    bool terminal_is_psd() const;
};

// Everything an improver needs: dynamics, cost and the initial state.
struct ControlProblem {
    BilinearSystem system;
    Objective objective;
    CVector psi0;

    ControlProblem(BilinearSystem system, Objective objective, CVector psi0);

    ControlProblem with_beta(double beta) const;
};

// L = sum_i |psi_i><psi_i|. Throws NotOrthonormal.
HermitianOperator projector_from_states(std::span<const CVector> states, Eigen::Index dim);

// Diagonal 0/1 projector onto the given basis indices.
HermitianOperator projector_from_indices(std::span<const int> indices, Eigen::Index dim);

bool is_projector(const HermitianOperator& l, double tol = kProjectorTol);

// Id - L. Minimizing P_Q becomes maximizing P_Q'. Throws NotProjector.
HermitianOperator complement(const HermitianOperator& l);

double terminal_cost(const HermitianOperator& l, const CVector& psi_T);

double total_cost(double terminal, double beta, const ControlProgram& ctrl);

struct CostBreakdown {
    double terminal = 0.0;  // I
    double energy = 0.0;    // z(T)
    double total = 0.0;     // J
    double max_norm_drift = 0.0;
};

CostBreakdown evaluate(const ControlProblem& problem, const ControlProgram& ctrl);
CostBreakdown evaluate(const ControlProblem& problem, const ControlProgram& ctrl,
                       const StateTrajectory& traj);

}  // namespace qctl
