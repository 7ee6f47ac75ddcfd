#include "qctl/dynamics.hpp"

#include <cmath>

#include "qctl/errors.hpp"

namespace qctl {

ControlProgram::ControlProgram(double horizon, std::vector<double> values)
    : horizon_(horizon), values_(std::move(values)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw InvalidArgument("control horizon must be positive");
    }
    if (values_.empty()) {
        throw InvalidArgument("control program needs at least one interval");
    }
    for (double u : values_) {
        if (!std::isfinite(u)) throw InvalidArgument("control values must be finite");
    }
}

ControlProgram ControlProgram::constant(double horizon, std::size_t n_steps, double value) {
    return ControlProgram(horizon, std::vector<double>(n_steps, value));
}

bool ControlProgram::feasible(const Bounds& bounds) const noexcept {
    for (double u : values_) {
        if (!bounds.contains(u)) return false;
    }
    return true;
}

ControlProgram ControlProgram::refined(std::size_t factor) const {
    if (factor == 0) throw InvalidArgument("refinement factor must be positive");
    std::vector<double> fine;
    fine.reserve(values_.size() * factor);
    for (double u : values_) {
        fine.insert(fine.end(), factor, u);
    }
    return ControlProgram(horizon_, std::move(fine));
}

namespace {

void check_dim(const BilinearSystem& sys, const CVector& v, const char* what) {
    if (v.size() != sys.dim()) {
        throw DimensionMismatch(std::string(what) + " dimension does not match the system");
    }
}

}  // namespace

StateTrajectory propagate_forward(const BilinearSystem& sys, const ControlProgram& ctrl,
                                  const CVector& psi0) {
    check_dim(sys, psi0, "psi0");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-12) {
        throw InvalidArgument("initial state must have unit norm");
    }
    const double dt = ctrl.dt();
    StateTrajectory traj;
    traj.nodes.reserve(ctrl.size() + 1);
    traj.nodes.push_back(psi0);
    double drift = 0.0;
    for (std::size_t k = 0; k < ctrl.size(); ++k) {
        traj.nodes.push_back(step_propagator(sys, ctrl[k], dt) * traj.nodes.back());
        drift = std::max(drift, std::abs(traj.nodes.back().squaredNorm() - 1.0));
    }
    traj.max_norm_drift = drift;
    if (drift > kNormTol) {
        throw NormDrift(drift);
    }
    return traj;
}

AdjointTrajectory propagate_backward(const BilinearSystem& sys, const ControlProgram& ctrl,
                                     const CVector& chi_T) {
    check_dim(sys, chi_T, "terminal costate");
    const double dt = ctrl.dt();
    const std::size_t n = ctrl.size();
    AdjointTrajectory adj;
    adj.nodes.resize(n + 1);
    adj.nodes[n] = chi_T;
    for (std::size_t k = n; k-- > 0;) {
        adj.nodes[k] = step_propagator(sys, ctrl[k], dt).adjoint() * adj.nodes[k + 1];
    }
    return adj;
}

double energy_integral(const ControlProgram& ctrl) {
    double z = 0.0;
    for (double u : ctrl.values()) z += u * u;
    return z * ctrl.dt();
}

double switching_value(const CVector& chi, const CMatrix& op, const CVector& psi) {
    return 2.0 * chi.dot(op * psi).imag();
}

std::vector<double> switching_profile(const AdjointTrajectory& adj, const StateTrajectory& traj,
                                      const CMatrix& op) {
    if (adj.nodes.size() != traj.nodes.size()) {
        throw DimensionMismatch("state and costate trajectories use different grids");
    }
    std::vector<double> k(traj.nodes.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        k[i] = switching_value(adj.nodes[i], op, traj.nodes[i]);
    }
    return k;
}

std::vector<double> k1_profile(const AdjointTrajectory& adj, const StateTrajectory& traj,
                               const BilinearSystem& sys) {
    return switching_profile(adj, traj, sys.h1().matrix());
}

}  // namespace qctl
