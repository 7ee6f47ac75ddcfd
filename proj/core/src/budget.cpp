#include "qctl/budget.hpp"

#include <cmath>
#include <sstream>

#include "qctl/errors.hpp"

namespace qctl {

const char* to_string(BudgetStatus s) noexcept {
    switch (s) {
        case BudgetStatus::Inactive: return "inactive";
        case BudgetStatus::Met: return "met";
        case BudgetStatus::Feasible: return "feasible";
    }
    return "unknown";
}

namespace {

std::string history_text(const std::vector<BracketPoint>& h) {
    std::ostringstream os;
    os.precision(6);
    for (const BracketPoint& p : h) os << " (" << p.beta << ", " << p.energy << ")";
    return os.str();
}

struct Run {
    double beta;
    OptimizationResult result;
    double energy;
};

}  // namespace

BudgetResult optimize_with_cap(const ControlProblem& problem, const ControlProgram& ctrl0,
                               double cap, const OptimizerConfig& inner, const BudgetConfig& cfg) {
    if (!(cap > 0.0)) throw InvalidArgument("energy cap must be positive");

    std::vector<BracketPoint> history;
    auto solve = [&](double beta, const ControlProgram& start) {
        OptimizationResult r = optimize(problem.with_beta(beta), start, inner);
        if (r.failed()) {
            throw InnerFailure("inner optimizer failed at beta=" + std::to_string(beta) + ": " +
                               r.diagnostic);
        }
        const double z = r.final_report().energy;
        history.push_back({beta, z});
        return Run{beta, std::move(r), z};
    };
    auto finish = [&](Run run, BudgetStatus status) {
        return BudgetResult{run.beta, run.energy, status, std::move(run.result), std::move(history)};
    };
    const double tol = cfg.cap_tol * cap;
    const double noise = cfg.noise_tol * cap;

    Run lo = solve(0.0, ctrl0);
    ControlProgram warm = lo.result.control;
    if (lo.energy <= cap) {
        return finish(std::move(lo), BudgetStatus::Inactive);
    }

    double beta = cfg.beta0.value_or(1e-4 * std::abs(lo.result.final_report().terminal) /
                                     std::max(lo.energy, 1e-300));
    if (!(beta > 0.0)) beta = 1e-8;

    std::optional<Run> hi;
    for (int j = 0; j < cfg.max_ladder; ++j, beta *= 4.0) {
        Run run = solve(beta, warm);
        warm = run.result.control;
        if (run.energy > lo.energy + noise) {
            throw BracketFailure("z(T) increased with beta on the ladder:" +
                                 history_text(history));
        }
        if (std::abs(run.energy - cap) <= tol) {
            return finish(std::move(run), BudgetStatus::Met);
        }
        if (run.energy < cap) {
            hi = std::move(run);
            break;
        }
        lo = std::move(run);
    }
    if (!hi) {
        throw BracketFailure("no beta on the ladder met the energy cap:" +
                             history_text(history));
    }

    for (int i = 0; i < cfg.max_bisections; ++i) {
        const double mid = lo.beta > 0.0 ? std::sqrt(lo.beta * hi->beta) : 0.5 * hi->beta;
        // Start from the over-cap side: the under-cap control may sit on a
        // stationary point such as u = 0 that no larger beta can leave.
        Run run = solve(mid, lo.result.control);
        if (run.energy > lo.energy + noise || run.energy < hi->energy - noise) {
            throw BracketFailure("z(T) is not monotone in beta:" + history_text(history));
        }
        if (std::abs(run.energy - cap) <= tol) {
            return finish(std::move(run), BudgetStatus::Met);
        }
        if (run.energy > cap) {
            lo = std::move(run);
        } else {
            hi = std::move(run);
        }
    }
    return finish(std::move(*hi), BudgetStatus::Feasible);
}

}  // namespace qctl
