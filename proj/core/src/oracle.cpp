#include "qctl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qctl/errors.hpp"

namespace qctl {

OracleResult brute_force_bang_bang(const ControlProblem& problem, double horizon,
                                   std::size_t n_steps, std::span<const double> levels_in,
                                   bool keep_table, double tie_tol) {
    if (levels_in.empty()) throw InvalidArgument("oracle needs at least one control level");
    if (n_steps == 0) throw InvalidArgument("oracle needs at least one interval");
    std::vector<double> levels(levels_in.begin(), levels_in.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double u : levels) {
        if (!problem.system.bounds().contains(u)) {
            throw InvalidArgument("oracle level outside the control bounds");
        }
    }
    const double total = std::pow(static_cast<double>(levels.size()), static_cast<double>(n_steps));
    if (n_steps > kOracleMaxSteps || total > kOracleMaxEvaluations) {
        throw BudgetExceeded("enumeration of " + std::to_string(levels.size()) + "^" +
                             std::to_string(n_steps) + " controls exceeds the oracle budget");
    }

    const double dt = horizon / static_cast<double>(n_steps);
    const std::size_t m = levels.size();
    std::vector<CMatrix> steps;
    steps.reserve(m);
    for (double u : levels) steps.push_back(step_propagator(problem.system, u, dt));

    const CMatrix& l = problem.objective.terminal.matrix();
    const double beta = problem.objective.beta;

    // states[d] = state after the first d intervals of the current sequence.
    std::vector<CVector> states(n_steps + 1);
    std::vector<double> energy(n_steps + 1, 0.0);
    std::vector<std::size_t> index(n_steps, 0);
    states[0] = problem.psi0;

    OracleResult out{ControlProgram::constant(horizon, n_steps, levels[0]), 0.0, 0, 0, {}};
    if (keep_table) out.table.reserve(static_cast<std::size_t>(total));
    std::vector<std::size_t> best_index;
    bool have_best = false;

    std::size_t dirty = 0;  // first depth whose state must be recomputed
    while (true) {
        for (std::size_t d = dirty; d < n_steps; ++d) {
            states[d + 1] = steps[index[d]] * states[d];
            energy[d + 1] = energy[d] + levels[index[d]] * levels[index[d]] * dt;
        }
        const CVector& psi = states[n_steps];
        const double j = -psi.dot(l * psi).real() + beta * energy[n_steps];
        ++out.evaluated;
        if (keep_table) out.table.push_back(j);

        const double tol = tie_tol * std::max(1.0, std::abs(j));
        if (!have_best || j < out.best_cost - tol) {
            out.best_cost = j;
            out.optima_count = 1;
            best_index = index;
            have_best = true;
        } else if (std::abs(j - out.best_cost) <= tol) {
            ++out.optima_count;
        }

        // Odometer increment, last interval fastest.
        std::size_t d = n_steps;
        while (d > 0 && index[d - 1] + 1 == m) {
            index[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
        ++index[d - 1];
        dirty = d - 1;
    }

    std::vector<double> u(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) u[k] = levels[best_index[k]];
    out.best = ControlProgram(horizon, std::move(u));
    return out;
}

namespace {

void check_fd_bounds(const ControlProblem& problem, double u, double h) {
    const Bounds& b = problem.system.bounds();
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    if (!b.contains(u - h) || !b.contains(u + h)) {
        throw StepOutOfBounds("u_k +- h leaves the control bounds");
    }
}

}  // namespace

double fd_gradient(const ControlProblem& problem, const ControlProgram& ctrl, std::size_t k,
                   double h) {
    if (k >= ctrl.size()) throw InvalidArgument("control index out of range");
    check_fd_bounds(problem, ctrl[k], h);
    std::vector<double> plus(ctrl.values().begin(), ctrl.values().end());
    std::vector<double> minus = plus;
    plus[k] += h;
    minus[k] -= h;
    const double j_plus = evaluate(problem, ControlProgram(ctrl.horizon(), std::move(plus))).total;
    const double j_minus = evaluate(problem, ControlProgram(ctrl.horizon(), std::move(minus))).total;
    return (j_plus - j_minus) / (2.0 * h);
}

std::vector<double> fd_gradient_all(const ControlProblem& problem, const ControlProgram& ctrl,
                                    double h) {
    const std::size_t n = ctrl.size();
    const double dt = ctrl.dt();
    const BilinearSystem& sys = problem.system;
    const CMatrix& l = problem.objective.terminal.matrix();
    const double beta = problem.objective.beta;
    const double base_energy = energy_integral(ctrl);

    std::vector<CMatrix> steps(n);
    std::vector<CVector> prefix(n + 1);
    prefix[0] = problem.psi0;
    for (std::size_t k = 0; k < n; ++k) {
        check_fd_bounds(problem, ctrl[k], h);
        steps[k] = step_propagator(sys, ctrl[k], dt);
        prefix[k + 1] = steps[k] * prefix[k];
    }
    // suffix[k] = U_{N-1} ... U_{k}, suffix[n] = Id
    std::vector<CMatrix> suffix(n + 1);
    suffix[n] = CMatrix::Identity(sys.dim(), sys.dim());
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * steps[k];

    auto cost_with = [&](std::size_t k, double u) {
        const CVector psi_T = suffix[k + 1] * (step_propagator(sys, u, dt) * prefix[k]);
        const double energy = base_energy + (u * u - ctrl[k] * ctrl[k]) * dt;
        return -psi_T.dot(l * psi_T).real() + beta * energy;
    };
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        g[k] = (cost_with(k, ctrl[k] + h) - cost_with(k, ctrl[k] - h)) / (2.0 * h);
    }
    return g;
}

PulseAreaSolution pulse_area_solution(double u_max, double horizon) {
    if (!(u_max > 0.0) || !(horizon > 0.0)) {
        throw InvalidArgument("pulse-area solution needs u_max > 0 and T > 0");
    }
    PulseAreaSolution s;
    s.target_area = std::numbers::pi / 2.0;
    const double area = u_max * horizon;
    s.reachable = area >= s.target_area;
    const double best = std::sin(std::min(area, s.target_area));
    s.optimal_cost = s.reachable ? -1.0 : -best * best;
    return s;
}

CMatrix pauli_x_rotation(double theta) {
    CMatrix r(2, 2);
    const Complex c(std::cos(theta), 0.0);
    const Complex s(0.0, -std::sin(theta));
    r << c, s, s, c;
    return r;
}

}  // namespace qctl
