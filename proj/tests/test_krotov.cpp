#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qctl/errors.hpp"
#include "qctl/krotov.hpp"

using namespace qctl;
using namespace qctl::testing;

namespace {

BilinearSystem pauli(const CMatrix& h0, double lo = -1.0, double hi = 1.0) {
    return BilinearSystem(validate_hermitian(h0), validate_hermitian(sigma_x()), Bounds(lo, hi));
}

// Maximizes k1 u - beta u^2 on a fine grid over the bounds.
double grid_argmax(double k1, double beta, const Bounds& b) {
    const int n = 400000;
    double best_u = b.lo(), best = -1e300;
    for (int i = 0; i <= n; ++i) {
        const double u = b.lo() + (b.hi() - b.lo()) * i / n;
        const double v = k1 * u - beta * u * u;
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    return best_u;
}

// Adjusts chi so that 2 Im <chi, H1 psi> = 0.
CVector zero_switching(CVector chi, const CVector& psi, const CMatrix& h1) {
    const CVector v = h1 * psi;
    const double k1 = switching_value(chi, h1, psi);
    chi += Complex(0, 1) * (k1 / (2.0 * v.squaredNorm())) * v;
    return chi;
}

}  // namespace

TEST(UpdateRule, Examples) {
    EXPECT_EQ(krotov_update_rule(-0.5, 0.0, Bounds(-1, 2), 1e-8), -1.0);
    EXPECT_EQ(krotov_update_rule(0.5, 0.0, Bounds(-1, 2), 1e-8), 2.0);
    EXPECT_DOUBLE_EQ(krotov_update_rule(1.0, 1.0, Bounds(-2, 2), 1e-8), 0.5);
    EXPECT_EQ(krotov_update_rule(10.0, 1.0, Bounds(0, 1), 1e-8), 1.0);
}

TEST(UpdateRule, MatchesGridMaximizer) {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const Bounds b(rng.uniform(-2, 0), rng.uniform(0.1, 2));
        const double k1 = rng.uniform(-4, 4);
        const double beta = rng.uniform(0.05, 3);
        EXPECT_NEAR(krotov_update_rule(k1, beta, b, 1e-8), grid_argmax(k1, beta, b), 1e-5);
    }
    EXPECT_NEAR(grid_argmax(1.0, 1.0, Bounds(-2, 2)), 0.5, 1e-5);
}

TEST(UpdateRule, SingularBranch) {
    EXPECT_THROW(krotov_update_rule(0.0, 0.0, Bounds(-1, 1), 1e-8), SingularUnavailable);
    EXPECT_DOUBLE_EQ(krotov_update_rule(1e-9, 0.0, Bounds(-1, 1), 1e-8, 0.25), 0.25);
    EXPECT_DOUBLE_EQ(krotov_update_rule(0.0, 0.0, Bounds(-1, 1), 1e-8, 3.0), 1.0);
}

TEST(SingularControl, NoDriftKeepsOldControl) {
    const auto sys = pauli(CMatrix::Zero(2, 2));
    Rng rng(52);
    const CVector psi = rng.unit_state(2);
    EXPECT_NEAR(*singular_control(psi, psi, sys, 0.3), 0.3, 1e-15);
}

TEST(SingularControl, PauliEvaluation) {
    const auto sys = pauli(sigma_z());
    EXPECT_NEAR(*singular_control(basis(2, 0), basis(2, 0), sys, -0.4), -0.4, 1e-15);
}

TEST(SingularControl, DegenerateDenominator) {
    const auto sys = pauli(sigma_z());
    EXPECT_FALSE(singular_control(basis(2, 1), basis(2, 0), sys, 0.0).has_value());
}

TEST(SingularControl, HoldsSwitchingFunctionToSecondOrder) {
    Rng rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = BilinearSystem(validate_hermitian(rng.hermitian(3, 1.0)),
                                        validate_hermitian(rng.hermitian(3, 1.0)), Bounds(-50, 50));
        const CMatrix& h1 = sys.h1().matrix();
        const CVector psi = rng.unit_state(3);
        const CVector chi = zero_switching(rng.unit_state(3), psi, h1);
        ASSERT_LE(std::abs(switching_value(chi, h1, psi)), 1e-14);
        const double u_old = rng.uniform(-0.5, 0.5);
        const double u_sing = *singular_control(chi, psi, sys, u_old);

        auto residual = [&](double dt) {
            const CVector psi1 = step_propagator(sys, u_sing, dt) * psi;
            const CVector chi1 = step_propagator(sys, u_old, dt) * chi;
            return std::abs(switching_value(chi1, h1, psi1));
        };
        const double r1 = residual(1e-2), r2 = residual(5e-3);
        const double c_norm = sys.drift_commutator().norm();
        EXPECT_LE(r1, 10 * (c_norm + 1.0) * 1e-4 * (1 + std::abs(u_sing)));
        EXPECT_GT(r1 / r2, 3.0);
    }
}

TEST(SingularBranches, FlatSwitchingFunctionStays) {
    const auto sys = pauli(CMatrix::Zero(2, 2));
    const auto set = singular_branches(basis(2, 0), basis(2, 0), sys, 0.0);
    EXPECT_TRUE(set.stay);
    EXPECT_FALSE(set.leave_low);
    EXPECT_FALSE(set.leave_high);
}

TEST(SingularBranches, SaturatedBelowLeavesLow) {
    const auto sys = pauli(sigma_z());
    const CVector psi = basis(2, 0);
    const CVector chi = (basis(2, 0) + basis(2, 1)) / std::sqrt(2.0);
    EXPECT_NEAR(*singular_control(chi, psi, sys, 0.0), -2.0, 1e-14);
    const auto set = singular_branches(chi, psi, sys, 0.0);
    EXPECT_FALSE(set.stay);
    EXPECT_TRUE(set.leave_low);
    EXPECT_FALSE(set.leave_high);
}

TEST(SingularBranches, AllBranchesAvailable) {
    const auto sys = pauli(sigma_z());
    const auto set = singular_branches(-basis(2, 0), basis(2, 0), sys, 0.0);
    EXPECT_TRUE(set.stay);
    EXPECT_TRUE(set.leave_low);
    EXPECT_TRUE(set.leave_high);
}

TEST(TerminalCheck, Examples) {
    const auto sys = pauli(sigma_z());
    const CVector plus = (basis(2, 0) + basis(2, 1)) / std::sqrt(2.0);
    const auto l = projector_from_states(std::span(&plus, 1), 2);
    EXPECT_TRUE(check_terminal_nonsingular(l.matrix() * plus, plus, sys, 1e-8).warning);
    EXPECT_TRUE(check_terminal_nonsingular(CVector::Zero(2), plus, sys, 1e-8).warning);

    Rng rng(54);
    const auto problem = random_problem(rng, 3, 0.0);
    const CVector psi = rng.unit_state(3);
    const auto c = check_terminal_nonsingular(problem.objective.terminal.matrix() * psi, psi,
                                              problem.system, 1e-8);
    EXPECT_GT(std::abs(c.k1), 1e-8);
    EXPECT_FALSE(c.warning);
}

TEST(KrotovStep, ZeroControlWithPenaltyIsFixedPoint) {
    const auto problem = pulse_area_problem(-1, 1, 0.1);
    const auto ctrl = ControlProgram::constant(kPi, 10, 0.0);
    const auto step = krotov_improve_step(problem, ctrl);
    for (std::size_t k = 0; k < ctrl.size(); ++k) EXPECT_EQ(step.control[k], 0.0);
    EXPECT_NEAR(step.report.j_after, step.report.j_before, 1e-12);
}

TEST(KrotovStep, OptimalSingularControlIsFixedPoint) {
    // Area pi/2 spread uniformly: full transfer with K1 = 0 everywhere.
    const auto problem = pulse_area_problem(0, 1, 0);
    const auto ctrl = ControlProgram::constant(kPi, 10, 0.5);
    const auto step = krotov_improve_step(problem, ctrl);
    for (std::size_t k = 0; k < ctrl.size(); ++k) EXPECT_NEAR(step.control[k], 0.5, 1e-12);
    EXPECT_NEAR(step.report.j_after, -1.0, 1e-12);
    EXPECT_NEAR(step.report.j_after, step.report.j_before, 1e-12);
    EXPECT_TRUE(step.report.terminal_singular);
}

TEST(KrotovStep, PulseAreaTransfer) {
    const auto problem = pulse_area_problem(0, 1, 0);
    auto ctrl = ControlProgram::constant(kPi, 10, 0.1);
    double i = 0;
    int steps = 0;
    for (; steps < 20 && i > -0.999; ++steps) {
        auto step = krotov_improve_step(problem, ctrl);
        i = step.report.i_after;
        ctrl = std::move(step.control);
    }
    EXPECT_LE(i, -0.999);
    EXPECT_LE(steps, 20);
}

TEST(KrotovStep, BangStructureWithoutPenalty) {
    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const auto problem = random_problem(rng, 3, 0.0);
        const ControlProgram ctrl(3.0, rng.controls(200, -1, 1));
        const auto step = krotov_improve_step(problem, ctrl);
        if (step.report.damping_used != 1.0) continue;
        for (std::size_t k = 0; k < ctrl.size(); ++k) {
            if (step.report.singular[k]) continue;
            EXPECT_TRUE(step.control[k] == -1.0 || step.control[k] == 1.0);
            const double k1 = step.report.k1[k];
            // Bang sign follows K1 unless the arc saturated.
            if (std::abs(k1) > 1e-3) EXPECT_EQ(step.control[k], k1 > 0 ? 1.0 : -1.0);
        }
    }
}

TEST(KrotovStep, PenalizedControlFollowsSwitchingFunction) {
    Rng rng(56);
    const double beta = 0.5;
    const auto problem = random_problem(rng, 4, beta);
    const ControlProgram ctrl(2.0, rng.controls(100, -1, 1));
    const auto step = krotov_improve_step(problem, ctrl);
    ASSERT_EQ(step.report.damping_used, 1.0);
    for (std::size_t k = 0; k < ctrl.size(); ++k)
        EXPECT_DOUBLE_EQ(step.control[k], Bounds(-1, 1).clip(step.report.k1[k] / (2 * beta)));
    EXPECT_EQ(step.report.singular_fraction, 0.0);
}

TEST(KrotovStep, RejectsIndefiniteTerminalAndInfeasibleControl) {
    const auto base = pulse_area_problem(0, 1, 0);
    const ControlProblem indefinite(base.system, Objective(validate_hermitian(sigma_z())), base.psi0);
    EXPECT_THROW(krotov_improve_step(indefinite, ControlProgram::constant(1.0, 4, 0.5)),
                 InvalidArgument);
    EXPECT_THROW(krotov_improve_step(base, ControlProgram::constant(1.0, 4, 2.0)), InvalidArgument);
}

TEST(KrotovStep, PoliciesStayFeasibleAndMonotone) {
    const auto problem = detuned_problem();
    for (auto policy : {SingularPolicy::StayUntilSaturation, SingularPolicy::AlwaysLeaveLow,
                        SingularPolicy::AlwaysLeaveHigh}) {
        KrotovConfig cfg;
        cfg.singular.policy = policy;
        auto ctrl = ControlProgram::constant(6.0, 100, 0.3);
        for (int s = 0; s < 5; ++s) {
            auto step = krotov_improve_step(problem, ctrl, cfg);
            EXPECT_LE(step.report.j_after, step.report.j_before + 1e-10);
            EXPECT_TRUE(step.control.feasible(problem.system.bounds()));
            ctrl = std::move(step.control);
        }
    }
}

TEST(KrotovProperty, MonotoneAndFeasible) {
    Rng rng(57);
    for (int trial = 0; trial < 8; ++trial) {
        const double beta = trial % 2 ? 0.01 : 0.0;
        const auto problem = random_problem(rng, rng.integer(2, 4), beta);
        auto ctrl = ControlProgram(4.0, rng.controls(200, -1, 1));
        for (int s = 0; s < 15; ++s) {
            auto step = krotov_improve_step(problem, ctrl);
            EXPECT_LE(step.report.j_after, step.report.j_before + 1e-10);
            EXPECT_TRUE(step.control.feasible(problem.system.bounds()));
            EXPECT_NEAR(evaluate(problem, step.control).total, step.report.j_after, 1e-13);
            ctrl = std::move(step.control);
        }
    }
}

TEST(SingularArcs, DetunedFixtureArcQuality) {
    const auto problem = detuned_problem();
    const double c_norm = problem.system.drift_commutator().norm();
    double excess[2];
    int i = 0;
    for (std::size_t n : {100u, 200u}) {
        const auto step = krotov_improve_step(problem, ControlProgram::constant(6.0, n, 0.3));
        const double dt = 6.0 / static_cast<double>(n);
        double worst = 0;
        bool found = false;
        for (const auto& arc : singular_arcs(step.report)) {
            if (arc.length() < 3) continue;
            found = true;
            worst = std::max(worst, arc.max_abs_k1);
        }
        ASSERT_TRUE(found);
        EXPECT_LE(worst, 1e-8 + 10 * c_norm * dt * dt);
        excess[i++] = worst;
    }
    EXPECT_GE(excess[0] / excess[1], 3.0);
}

TEST(SingularArcs, RunDetection) {
    KrotovStepReport r;
    r.singular = {0, 1, 1, 0, 1, 1, 1};
    r.k1 = {0, 0, 0.1, 0.2, 0, 0.3, 0.05, 0.4};
    const auto arcs = singular_arcs(r);
    ASSERT_EQ(arcs.size(), 2u);
    EXPECT_EQ(arcs[0].first, 1u);
    EXPECT_EQ(arcs[0].length(), 2u);
    EXPECT_DOUBLE_EQ(arcs[0].max_abs_k1, 0.2);
    EXPECT_EQ(arcs[1].first, 4u);
    EXPECT_EQ(arcs[1].last, 6u);
    EXPECT_DOUBLE_EQ(arcs[1].max_abs_k1, 0.4);
}
