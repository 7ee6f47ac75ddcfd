#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qctl/errors.hpp"
#include "qctl/objective.hpp"

using namespace qctl;
using namespace qctl::testing;

TEST(ProjectorFromStates, RankOne) {
    const CVector s = basis(2, 1);
    const auto p = projector_from_states(std::span(&s, 1), 2);
    CMatrix expected(2, 2);
    expected << 0, 0, 0, 1;
    EXPECT_EQ(p.matrix(), expected);
}

TEST(ProjectorFromStates, FullBasisIsIdentity) {
    std::vector<CVector> states;
    for (int i = 0; i < 4; ++i) states.push_back(basis(4, i));
    EXPECT_LE((projector_from_states(states, 4).matrix() - CMatrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(ProjectorFromStates, EmptyListIsZero) {
    EXPECT_EQ(projector_from_states({}, 3).matrix(), CMatrix::Zero(3, 3));
}

TEST(ProjectorFromStates, RejectsNonOrthonormal) {
    std::vector<CVector> states{basis(2, 0), (basis(2, 0) + basis(2, 1)) / std::sqrt(2.0)};
    EXPECT_THROW(projector_from_states(states, 2), NotOrthonormal);
    std::vector<CVector> unnormalized{2.0 * basis(2, 0)};
    EXPECT_THROW(projector_from_states(unnormalized, 2), NotOrthonormal);
}

TEST(Complement, Examples) {
    EXPECT_EQ(complement(HermitianOperator::zero(2)).matrix(), CMatrix::Identity(2, 2));
    EXPECT_EQ(complement(HermitianOperator::identity(2)).matrix(), CMatrix::Zero(2, 2));
    const int one[] = {1};
    const int zero[] = {0};
    EXPECT_EQ(complement(projector_from_indices(one, 2)).matrix(),
              projector_from_indices(zero, 2).matrix());
}

TEST(Complement, RejectsNonProjector) {
    EXPECT_THROW(complement(validate_hermitian(sigma_x())), NotProjector);
}

TEST(TerminalCost, Examples) {
    const int one[] = {1};
    const auto l = projector_from_indices(one, 2);
    EXPECT_DOUBLE_EQ(terminal_cost(l, basis(2, 1)), -1.0);
    EXPECT_DOUBLE_EQ(terminal_cost(l, basis(2, 0)), 0.0);
    EXPECT_NEAR(terminal_cost(l, (basis(2, 0) + basis(2, 1)) / std::sqrt(2.0)), -0.5, 1e-15);
}

TEST(TotalCost, Examples) {
    const auto ctrl = ControlProgram::constant(1.0, 4, 0.5);
    EXPECT_DOUBLE_EQ(total_cost(-0.3, 0.0, ctrl), -0.3);
    EXPECT_DOUBLE_EQ(total_cost(-1.0, 1.0, ControlProgram::constant(1.0, 4, 0.0)), -1.0);
    // z(T) = 2 from u = 1 on T = 2.
    EXPECT_NEAR(total_cost(-0.9, 0.1, ControlProgram::constant(2.0, 3, 1.0)), -0.7, 1e-15);
}

TEST(Objective, Validation) {
    EXPECT_THROW(Objective(HermitianOperator::identity(2), -0.1), InvalidArgument);
    EXPECT_THROW(Objective(HermitianOperator::identity(2), 0.0, 0.0), InvalidArgument);
    EXPECT_TRUE(Objective(HermitianOperator::identity(2)).terminal_is_psd());
    EXPECT_FALSE(Objective(validate_hermitian(sigma_z())).terminal_is_psd());
}

TEST(ControlProblem, RejectsUnnormalizedState) {
    const auto base = pulse_area_problem(0, 1, 0);
    EXPECT_THROW(ControlProblem(base.system, base.objective, 0.5 * basis(2, 0)), InvalidArgument);
    EXPECT_THROW(ControlProblem(base.system, base.objective, basis(3, 0)), DimensionMismatch);
}

TEST(Evaluate, PulseAreaTransfer) {
    const auto problem = pulse_area_problem(0, 1, 0.1);
    const auto c = evaluate(problem, ControlProgram::constant(kPi / 2, 8, 1.0));
    EXPECT_NEAR(c.terminal, -1.0, 1e-14);
    EXPECT_NEAR(c.energy, kPi / 2, 1e-14);
    EXPECT_NEAR(c.total, -1.0 + 0.1 * kPi / 2, 1e-14);
}

TEST(ObjectiveProperty, ProbabilityRangeComplementAndPhase) {
    Rng rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index n = rng.integer(1, 8);
        const auto l = rng.projector(n, rng.integer(1, static_cast<int>(n)));
        ASSERT_TRUE(is_projector(l));
        const CVector psi = rng.unit_state(n);
        const double i = terminal_cost(l, psi);
        EXPECT_GE(i, -1.0 - 1e-12);
        EXPECT_LE(i, 1e-12);
        EXPECT_NEAR(i + terminal_cost(complement(l), psi), -1.0, 1e-12);
        const CVector rotated = std::polar(1.0, rng.uniform(0, 2 * kPi)) * psi;
        EXPECT_NEAR(terminal_cost(l, rotated), i, 1e-12);
    }
}
