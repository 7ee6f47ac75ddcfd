#include <benchmark/benchmark.h>

#include <random>

#include "qctl/gradient.hpp"
#include "qctl/krotov.hpp"
#include "qctl/oracle.hpp"

using namespace qctl;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> d;
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(d(rng), d(rng));
    return 0.5 * (a + a.adjoint());
}

ControlProblem random_problem(Eigen::Index n, double beta) {
    std::mt19937_64 rng(n);
    BilinearSystem sys(validate_hermitian(random_hermitian(rng, n)),
                       validate_hermitian(random_hermitian(rng, n)), Bounds(-1.0, 1.0));
    std::vector<int> target{0};
    return ControlProblem(std::move(sys), Objective(projector_from_indices(target, n), beta),
                          CVector::Unit(n, n - 1));
}

ControlProgram random_control(std::size_t steps) {
    std::mt19937_64 rng(steps);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> values(steps);
    for (double& v : values) v = u(rng);
    return ControlProgram(5.0, std::move(values));
}

}  // namespace

static void BM_StepPropagator(benchmark::State& state) {
    const auto problem = random_problem(state.range(0), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(step_propagator(problem.system, 0.3, 0.01));
}
BENCHMARK(BM_StepPropagator)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_PropagateForward(benchmark::State& state) {
    const auto problem = random_problem(state.range(0), 0.0);
    const auto ctrl = random_control(1000);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_forward(problem.system, ctrl, problem.psi0));
}
BENCHMARK(BM_PropagateForward)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_CostGradient(benchmark::State& state) {
    const auto problem = random_problem(state.range(0), 0.01);
    const auto ctrl = random_control(1000);
    for (auto _ : state) benchmark::DoNotOptimize(cost_gradient(problem, ctrl));
}
BENCHMARK(BM_CostGradient)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_KrotovStep(benchmark::State& state) {
    const auto problem = random_problem(state.range(0), 0.01);
    const auto ctrl = random_control(1000);
    for (auto _ : state) benchmark::DoNotOptimize(krotov_improve_step(problem, ctrl));
}
BENCHMARK(BM_KrotovStep)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_BruteForceOracle(benchmark::State& state) {
    const auto problem = random_problem(2, 0.0);
    const double levels[] = {-1.0, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            brute_force_bang_bang(problem, 3.0, static_cast<std::size_t>(state.range(0)), levels));
}
BENCHMARK(BM_BruteForceOracle)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
