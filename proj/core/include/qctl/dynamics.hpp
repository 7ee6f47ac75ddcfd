#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qctl/operator.hpp"

namespace qctl {

inline constexpr double kNormTol = 1e-9;

// Piecewise-constant control on a uniform grid: values[k] holds on
// [k*dt, (k+1)*dt), dt = horizon / size().
class ControlProgram {
public:
    ControlProgram(double horizon, std::vector<double> values);

    static ControlProgram constant(double horizon, std::size_t n_steps, double value);

    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return values_.size(); }
    double dt() const noexcept { return horizon_ / static_cast<double>(values_.size()); }
    double operator[](std::size_t k) const { return values_[k]; }
    std::span<const double> values() const noexcept { return values_; }

    bool feasible(const Bounds& bounds) const noexcept;

    // Same piecewise-constant function on a grid `factor` times finer.
    ControlProgram refined(std::size_t factor) const;

private:
    double horizon_;
    std::vector<double> values_;
};

struct StateTrajectory {
    std::vector<CVector> nodes;  // Psi(t_0) .. Psi(t_N)
    double max_norm_drift = 0.0;

    const CVector& final_state() const { return nodes.back(); }
};

struct AdjointTrajectory {
    std::vector<CVector> nodes;  // chi(t_0) .. chi(t_N)
};

// Psi(t_{k+1}) = exp(-i H(u_k) dt) Psi(t_k). Throws NormDrift when any node
// leaves the unit sphere by more than kNormTol.
StateTrajectory propagate_forward(const BilinearSystem& sys, const ControlProgram& ctrl,
                                  const CVector& psi0);

// chi(t_k) = exp(-i H(u_k) dt)^dagger chi(t_{k+1}), chi(t_N) = chi_T.
AdjointTrajectory propagate_backward(const BilinearSystem& sys, const ControlProgram& ctrl,
                                     const CVector& chi_T);

// z(T) = sum_k u_k^2 dt
double energy_integral(const ControlProgram& ctrl);

// 2 Im <chi, op psi>
double switching_value(const CVector& chi, const CMatrix& op, const CVector& psi);

// K(t_k) = 2 Im <chi(t_k), op Psi(t_k)> at every node.
std::vector<double> switching_profile(const AdjointTrajectory& adj, const StateTrajectory& traj,
                                      const CMatrix& op);

// K1 at every node; K0 is switching_profile with the drift operator.
std::vector<double> k1_profile(const AdjointTrajectory& adj, const StateTrajectory& traj,
                               const BilinearSystem& sys);

}  // namespace qctl
