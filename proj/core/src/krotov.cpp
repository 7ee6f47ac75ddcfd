#include "qctl/krotov.hpp"

#include <cmath>

#include "qctl/errors.hpp"

namespace qctl {

double SingularConfig::resolved_k1_tol(const ControlProblem& problem) const {
    if (k1_tol) {
        if (!(*k1_tol > 0.0)) throw InvalidArgument("k1_tol must be positive");
        return *k1_tol;
    }
    return 1e-8 * problem.system.h1().norm() * problem.objective.terminal.norm();
}

double krotov_update_rule(double k1, double beta, const Bounds& bounds, double k1_tol,
                          std::optional<double> singular_value) {
    if (beta > 0.0) {
        return bounds.clip(k1 / (2.0 * beta));
    }
    if (k1 > k1_tol) return bounds.hi();
    if (k1 < -k1_tol) return bounds.lo();
    if (!singular_value) {
        throw SingularUnavailable("K1 vanishes and no singular control is available");
    }
    return bounds.clip(*singular_value);
}

namespace {

double commutator_term(const CVector& chi, const CVector& psi, const BilinearSystem& sys) {
    return chi.dot(sys.drift_commutator() * psi).real();
}

double curvature_term(const CVector& chi, const CVector& psi, const BilinearSystem& sys) {
    return chi.dot(sys.coupling_squared() * psi).real();
}

}  // namespace

double switching_rate(const CVector& chi, const CVector& psi, const BilinearSystem& sys,
                      double u_old, double u) {
    return 2.0 * commutator_term(chi, psi, sys) + 2.0 * (u_old - u) * curvature_term(chi, psi, sys);
}

std::optional<double> singular_control(const CVector& chi, const CVector& psi,
                                       const BilinearSystem& sys, double u_old,
                                       double denom_tol) {
    const double denom = curvature_term(chi, psi, sys);
    if (std::abs(denom) < denom_tol) return std::nullopt;
    return u_old + commutator_term(chi, psi, sys) / denom;
}

std::optional<double> arc_hold_control(const CVector& chi, const CVector& psi,
                                       const BilinearSystem& sys, double u_old, double k1,
                                       double dt, double denom_tol) {
    const double denom = curvature_term(chi, psi, sys);
    if (std::abs(denom) < denom_tol) return std::nullopt;
    return u_old + (commutator_term(chi, psi, sys) + k1 / (2.0 * dt)) / denom;
}

BranchSet singular_branches(const CVector& chi, const CVector& psi, const BilinearSystem& sys,
                            double u_old, double denom_tol) {
    const Bounds& b = sys.bounds();
    BranchSet set;
    if (const auto u_sing = singular_control(chi, psi, sys, u_old, denom_tol)) {
        set.stay = b.contains(*u_sing);
    }
    set.leave_low = switching_rate(chi, psi, sys, u_old, b.lo()) < 0.0;
    set.leave_high = switching_rate(chi, psi, sys, u_old, b.hi()) > 0.0;
    return set;
}

TerminalCheck check_terminal_nonsingular(const CVector& chi_T, const CVector& psi_T,
                                         const BilinearSystem& sys, double k1_tol) {
    TerminalCheck c;
    c.k1 = switching_value(chi_T, sys.h1().matrix(), psi_T);
    c.warning = std::abs(c.k1) < k1_tol || c.k1 == 0.0;
    return c;
}

namespace {

struct Choice {
    double u;
    bool singular;
};

// Control for one interval of the beta = 0 sweep.
Choice choose_bang_or_arc(const CVector& chi, const CVector& psi, const BilinearSystem& sys,
                          double u_old, double k1, double dt, bool on_arc,
                          const SingularConfig& cfg, double k1_tol) {
    const Bounds& b = sys.bounds();
    const double bang = k1 > 0.0 ? b.hi() : b.lo();
    bool candidate = on_arc || std::abs(k1) <= k1_tol;
    if (!candidate) {
        // Bang control would carry K1 through zero inside this interval.
        const double predicted = k1 + dt * switching_rate(chi, psi, sys, u_old, bang);
        candidate = (predicted > 0.0) != (k1 > 0.0);
    }
    if (!candidate) return {bang, false};

    if (cfg.policy != SingularPolicy::StayUntilSaturation) {
        const BranchSet branches = singular_branches(chi, psi, sys, u_old, cfg.denom_tol);
        if (cfg.policy == SingularPolicy::AlwaysLeaveLow && branches.leave_low) return {b.lo(), false};
        if (cfg.policy == SingularPolicy::AlwaysLeaveHigh && branches.leave_high) return {b.hi(), false};
    }

    const auto hold = arc_hold_control(chi, psi, sys, u_old, k1, dt, cfg.denom_tol);
    if (hold) {
        if (b.contains(*hold)) return {*hold, true};
        // Saturated: leave toward the bound the arc control ran into.
        return {*hold < b.lo() ? b.lo() : b.hi(), false};
    }
    if (std::abs(k1) <= k1_tol) {
        // K1 = 0 with a degenerate denominator: any u is admissible, keep the old one.
        return {b.clip(u_old), true};
    }
    return {bang, false};
}

struct SweepResult {
    std::vector<double> u;
    std::vector<std::uint8_t> singular;
    std::vector<double> k1;
    StateTrajectory traj;
};

SweepResult forward_sweep(const ControlProblem& problem, const ControlProgram& ctrl_old,
                          const AdjointTrajectory& adj, double theta, const SingularConfig& cfg,
                          double k1_tol) {
    const BilinearSystem& sys = problem.system;
    const Bounds& bounds = sys.bounds();
    const CMatrix& h1 = sys.h1().matrix();
    const double beta = problem.objective.beta;
    const double dt = ctrl_old.dt();
    const std::size_t n = ctrl_old.size();

    SweepResult r;
    r.u.resize(n);
    r.singular.assign(n, 0);
    r.k1.resize(n + 1);
    r.traj.nodes.reserve(n + 1);
    r.traj.nodes.push_back(problem.psi0);

    double drift = 0.0;
    bool on_arc = false;
    for (std::size_t k = 0; k < n; ++k) {
        const CVector& psi = r.traj.nodes.back();
        const CVector& chi = adj.nodes[k];
        const double u_old = ctrl_old[k];
        const double k1 = switching_value(chi, h1, psi);
        r.k1[k] = k1;

        Choice c;
        if (beta > 0.0) {
            c = {krotov_update_rule(k1, beta, bounds, k1_tol), false};
        } else {
            c = choose_bang_or_arc(chi, psi, sys, u_old, k1, dt, on_arc, cfg, k1_tol);
        }
        on_arc = c.singular;
        r.singular[k] = c.singular ? 1 : 0;
        r.u[k] = theta == 1.0 ? c.u : bounds.clip(u_old + theta * (c.u - u_old));

        r.traj.nodes.push_back(step_propagator(sys, r.u[k], dt) * psi);
        drift = std::max(drift, std::abs(r.traj.nodes.back().squaredNorm() - 1.0));
    }
    r.k1[n] = switching_value(adj.nodes[n], h1, r.traj.nodes.back());
    r.traj.max_norm_drift = drift;
    if (drift > kNormTol) throw NormDrift(drift);
    return r;
}

}  // namespace

KrotovStep krotov_improve_step(const ControlProblem& problem, const ControlProgram& ctrl_old,
                               const KrotovConfig& cfg) {
    const BilinearSystem& sys = problem.system;
    if (!ctrl_old.feasible(sys.bounds())) {
        throw InvalidArgument("Krotov step requires a feasible control");
    }
    if (!problem.objective.terminal_is_psd()) {
        throw InvalidArgument("Krotov improvement requires a positive semidefinite terminal operator");
    }
    if (cfg.damp_max < 0) throw InvalidArgument("damp_max must be >= 0");
    const double k1_tol = cfg.singular.resolved_k1_tol(problem);

    const StateTrajectory old_traj = propagate_forward(sys, ctrl_old, problem.psi0);
    const CostBreakdown before = evaluate(problem, ctrl_old, old_traj);
    const CVector chi_T = problem.objective.terminal.matrix() * old_traj.final_state();
    const AdjointTrajectory adj = propagate_backward(sys, ctrl_old, chi_T);

    KrotovStepReport report;
    report.j_before = before.total;
    report.terminal_singular =
        check_terminal_nonsingular(chi_T, old_traj.final_state(), sys, k1_tol).warning;

    double theta = 1.0;
    double j_last = before.total;
    for (int attempt = 0; attempt <= cfg.damp_max; ++attempt, theta *= 0.5) {
        SweepResult sweep = forward_sweep(problem, ctrl_old, adj, theta, cfg.singular, k1_tol);
        ControlProgram next(ctrl_old.horizon(), std::move(sweep.u));
        const CostBreakdown after = evaluate(problem, next, sweep.traj);
        j_last = after.total;
        if (after.total <= before.total + cfg.mono_tol) {
            report.j_after = after.total;
            report.i_after = after.terminal;
            report.energy_after = after.energy;
            report.max_norm_drift = after.max_norm_drift;
            report.monotonicity_ok = true;
            report.damping_used = theta;
            report.damping_trials = attempt;
            std::size_t count = 0;
            for (auto s : sweep.singular) count += s;
            report.singular_fraction = static_cast<double>(count) / static_cast<double>(next.size());
            report.singular = std::move(sweep.singular);
            report.k1 = std::move(sweep.k1);
            return {std::move(next), std::move(report)};
        }
    }
    throw MonotonicityFailure(before.total, j_last, theta * 2.0);
}

std::vector<SingularArc> singular_arcs(const KrotovStepReport& report) {
    std::vector<SingularArc> arcs;
    const std::size_t n = report.singular.size();
    for (std::size_t k = 0; k < n;) {
        if (!report.singular[k]) {
            ++k;
            continue;
        }
        SingularArc arc;
        arc.first = k;
        while (k < n && report.singular[k]) ++k;
        arc.last = k - 1;
        for (std::size_t i = arc.first + 1; i <= arc.last + 1 && i < report.k1.size(); ++i) {
            arc.max_abs_k1 = std::max(arc.max_abs_k1, std::abs(report.k1[i]));
        }
        arcs.push_back(arc);
    }
    return arcs;
}

}  // namespace qctl
