#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qctl/objective.hpp"

namespace qctl {

enum class SingularPolicy {
    StayUntilSaturation,  // hold the arc while its control fits in [a,b]
    AlwaysLeaveLow,       // take u = a whenever the switching function allows it
    AlwaysLeaveHigh,      // take u = b whenever the switching function allows it
};

struct SingularConfig {
    // |K1| <= k1_tol counts as zero. Unset means 1e-8 * |H1| * |L|.
    std::optional<double> k1_tol;
    double denom_tol = 1e-12;
    SingularPolicy policy = SingularPolicy::StayUntilSaturation;

    double resolved_k1_tol(const ControlProblem& problem) const;
};

struct KrotovConfig {
    SingularConfig singular;
    double mono_tol = 1e-10;
    int damp_max = 20;
};

struct KrotovStepReport {
    double j_before = 0.0;
    double j_after = 0.0;
    double i_after = 0.0;
    double energy_after = 0.0;
    double max_norm_drift = 0.0;
    double singular_fraction = 0.0;
    bool monotonicity_ok = true;
    double damping_used = 1.0;  // accepted theta
    int damping_trials = 0;     // rejected sweeps before acceptance
    bool terminal_singular = false;

    std::vector<std::uint8_t> singular;  // per interval: 1 if set by the arc control
    std::vector<double> k1;              // 2 Im <chi_old(t_k), H1 Psi_new(t_k)>, k = 0..N
};

struct KrotovStep {
    ControlProgram control;
    KrotovStepReport report;
};

// Pointwise maximizer of K1 u - beta u^2 over [a,b].
//   beta > 0 : clip(K1 / (2 beta))
//   beta = 0 : b if K1 > tol, a if K1 < -tol, otherwise the clipped singular
//              value (SingularUnavailable when none is supplied).
double krotov_update_rule(double k1, double beta, const Bounds& bounds, double k1_tol,
                          std::optional<double> singular_value = std::nullopt);

// dK1/dt at the node when the new trajectory uses control u and the costate
// the old control u_old:
//   2 Re<chi, [H0,H1] psi> + 2 (u_old - u) Re<chi, H1^2 psi>
double switching_rate(const CVector& chi, const CVector& psi, const BilinearSystem& sys,
                      double u_old, double u);

// Control with dK1/dt = 0:
//   u_old + Re<chi, [H0,H1] psi> / Re<chi, H1^2 psi>
// Empty when |Re<chi, H1^2 psi>| < denom_tol.
std::optional<double> singular_control(const CVector& chi, const CVector& psi,
                                       const BilinearSystem& sys, double u_old,
                                       double denom_tol = 1e-12);

// Singular control plus the feedback that cancels the current K1 over one
// interval of length dt: K1 + dt * dK1/dt = 0. Keeps the discrete arc from
// accumulating the first-order hold error.
std::optional<double> arc_hold_control(const CVector& chi, const CVector& psi,
                                       const BilinearSystem& sys, double u_old, double k1,
                                       double dt, double denom_tol = 1e-12);

struct BranchSet {
    bool stay = false;
    bool leave_low = false;
    bool leave_high = false;
};

// Options at a point with K1 ~ 0: stay iff the singular control lies in
// [a,b]; leave toward a iff dK1/dt(a) < 0; leave toward b iff dK1/dt(b) > 0.
BranchSet singular_branches(const CVector& chi, const CVector& psi, const BilinearSystem& sys,
                            double u_old, double denom_tol = 1e-12);

struct TerminalCheck {
    double k1 = 0.0;
    bool warning = false;  // |K1(T)| < k1_tol: the next improvement may stall
};

TerminalCheck check_terminal_nonsingular(const CVector& chi_T, const CVector& psi_T,
                                         const BilinearSystem& sys, double k1_tol);

// One global improvement: backward costate sweep under ctrl_old, then a
// forward sweep choosing each u_k from the new state. Falls back to damping
// u_old + theta (u_new - u_old), theta = 1/2, 1/4, ..., when the sweep raises J
// by more than mono_tol. Throws MonotonicityFailure when damping runs out.
KrotovStep krotov_improve_step(const ControlProblem& problem, const ControlProgram& ctrl_old,
                               const KrotovConfig& cfg = {});

struct SingularArc {
    std::size_t first = 0;  // first interval on the arc
    std::size_t last = 0;   // last interval on the arc (inclusive)
    double max_abs_k1 = 0.0;  // over nodes reached under the arc control

    std::size_t length() const noexcept { return last - first + 1; }
};

// Maximal runs of singular intervals in a step report.
std::vector<SingularArc> singular_arcs(const KrotovStepReport& report);

}  // namespace qctl
