#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qctl/objective.hpp"

namespace qctl {

inline constexpr std::size_t kOracleMaxSteps = 14;
inline constexpr double kOracleMaxEvaluations = 1e7;

struct OracleResult {
    ControlProgram best;
    double best_cost = 0.0;
    std::size_t optima_count = 0;  // sequences within tie_tol of best_cost
    std::size_t evaluated = 0;
    std::vector<double> table;     // J in enumeration order, when requested
};

// Exhaustive search over piecewise-constant controls with values in `levels`
// on a grid of n_steps intervals over [0, horizon]. Sequences are visited in
// lexicographic order of their values; the first minimizer wins ties.
// Throws BudgetExceeded when n_steps > 14 or |levels|^n_steps > 1e7.
OracleResult brute_force_bang_bang(const ControlProblem& problem, double horizon,
                                   std::size_t n_steps, std::span<const double> levels,
                                   bool keep_table = false, double tie_tol = 1e-10);

// (J(u_k + h) - J(u_k - h)) / 2h from two fresh forward propagations.
// Throws StepOutOfBounds when u_k +- h leaves [a,b].
double fd_gradient(const ControlProblem& problem, const ControlProgram& ctrl, std::size_t k,
                   double h);

// Same central difference for every component. Reuses the per-interval
// propagators, but touches neither the costate nor the switching function.
std::vector<double> fd_gradient_all(const ControlProblem& problem, const ControlProgram& ctrl,
                                    double h);

// Drift-free two-level transfer |0> -> |1> with H = u sigma_x: the transfer
// probability is sin^2(int u dt).
struct PulseAreaSolution {
    double target_area = 0.0;  // pi/2
    bool reachable = false;    // u_max * T >= pi/2
    double optimal_cost = 0.0; // -1 if reachable, else -sin^2(u_max T)
};

PulseAreaSolution pulse_area_solution(double u_max, double horizon);

// exp(-i theta sigma_x) = cos(theta) Id - i sin(theta) sigma_x
CMatrix pauli_x_rotation(double theta);

}  // namespace qctl
