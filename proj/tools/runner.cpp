#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qctl/budget.hpp"
#include "qctl/oracle.hpp"

namespace qctl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json header(bool with_timestamp) {
    json h = {{"tool", "qctl"}, {"version", "0.1.0"}};
    if (with_timestamp) h["timestamp"] = timestamp();
    return h;
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct MethodRun {
    Method method;
    std::optional<OptimizationResult> result;
    std::optional<BudgetResult> budget;
    int exit_code = kExitOk;
    std::string error;

    const OptimizationResult* optimization() const {
        if (budget) return &budget->inner;
        if (result) return &*result;
        return nullptr;
    }
};

MethodRun execute(const ProblemBundle& bundle, Method method, const RunOptions& opts) {
    MethodRun run{method, std::nullopt, std::nullopt, kExitOk, {}};
    OptimizerConfig cfg = bundle.run.optimizer;
    cfg.method = method;
    cfg.record_controls = opts.trace_controls;
    if (opts.refine_on_failure && cfg.max_refinements == 0) cfg.max_refinements = 4;
    try {
        if (bundle.run.energy_cap) {
            run.budget = optimize_with_cap(bundle.problem, bundle.initial_control,
                                           *bundle.run.energy_cap, cfg);
        } else {
            run.result = optimize(bundle.problem, bundle.initial_control, cfg);
            if (run.result->failed()) {
                run.exit_code = kExitImprover;
                run.error = run.result->diagnostic;
            }
        }
    } catch (const BracketFailure& e) {
        run.exit_code = kExitBracket;
        run.error = e.what();
    } catch (const InnerFailure& e) {
        run.exit_code = kExitImprover;
        run.error = e.what();
    }
    return run;
}

void write_convergence(const fs::path& path, const OptimizationResult& r) {
    std::ofstream out(path);
    out << kCsvHeader << '\n';
    for (const IterationReport& it : r.history) {
        out << it.iteration << ',' << fmt(it.terminal) << ',' << fmt(it.total) << ','
            << fmt(it.energy) << ',' << fmt(it.max_norm_drift) << ',' << fmt(it.singular_fraction)
            << '\n';
    }
}

void write_controls(const fs::path& path, const OptimizationResult& r) {
    std::ofstream out(path);
    out << "iter";
    const std::size_t n = r.control_trace.empty() ? 0 : r.control_trace.front().size();
    for (std::size_t k = 0; k < n; ++k) out << ",u" << k;
    out << '\n';
    for (std::size_t i = 0; i < r.control_trace.size(); ++i) {
        out << r.history[i].iteration;
        for (double u : r.control_trace[i]) out << ',' << fmt(u);
        out << '\n';
    }
}

json report_json(const ProblemBundle& bundle, const MethodRun& run, bool with_timestamp) {
    json j;
    j["header"] = header(with_timestamp);
    j["schema"] = kSchemaVersion;
    j["method"] = to_string(run.method);
    j["config_echo"] = json::parse(bundle.config_echo);
    j["warnings"] = bundle.warnings;
    json iterations = json::array();
    json final_control = json::array();
    if (const OptimizationResult* r = run.optimization()) {
        for (const IterationReport& it : r->history) {
            iterations.push_back({{"iter", it.iteration},
                                  {"I", it.terminal},
                                  {"J", it.total},
                                  {"energy", it.energy},
                                  {"norm_drift", it.max_norm_drift},
                                  {"singular_fraction", it.singular_fraction},
                                  {"damping", it.damping},
                                  {"step", it.step},
                                  {"trials", it.trials},
                                  {"gradient_norm", nullable(it.gradient_norm)}});
        }
        for (double u : r->control.values()) final_control.push_back(u);
        j["T"] = r->control.horizon();
        j["N"] = r->control.size();
        j["stop_reason"] = to_string(r->stop);
        j["refinements"] = r->refinements;
        if (!r->diagnostic.empty()) j["diagnostic"] = r->diagnostic;
    }
    j["iterations"] = std::move(iterations);
    j["final_control"] = std::move(final_control);
    if (run.budget) {
        j["beta_star"] = run.budget->beta_star;
        j["z_T"] = run.budget->energy;
        j["budget_status"] = to_string(run.budget->status);
        json hist = json::array();
        for (const BracketPoint& p : run.budget->bracket_history) hist.push_back({p.beta, p.energy});
        j["bracket_history"] = std::move(hist);
    }
    if (!run.error.empty()) j["error"] = run.error;
    j["exit_status"] = run.exit_code;
    return j;
}

void write_run(const ProblemBundle& bundle, const MethodRun& run, const RunOptions& opts) {
    const fs::path dir = opts.out_dir / to_string(run.method);
    fs::create_directories(dir);
    std::ofstream(dir / "report.json") << report_json(bundle, run, opts.with_timestamp).dump(2) << '\n';
    if (const OptimizationResult* r = run.optimization()) {
        write_convergence(dir / "convergence.csv", *r);
        if (opts.trace_controls) write_controls(dir / "controls.csv", *r);
    }
}

void summarize(const MethodRun& run, std::ostream& log) {
    log << to_string(run.method) << ": ";
    if (const OptimizationResult* r = run.optimization()) {
        const IterationReport& f = r->final_report();
        log << "iterations " << f.iteration << ", I " << fmt(f.terminal) << ", J " << fmt(f.total)
            << ", z(T) " << fmt(f.energy) << ", stop " << to_string(r->stop);
        if (run.budget) {
            log << ", beta* " << fmt(run.budget->beta_star) << " (" << to_string(run.budget->status)
                << ")";
        }
    }
    if (!run.error.empty()) log << "\n  error: " << run.error;
    log << '\n';
}

// Iterations each method needs to reach 90% of the best improvement found.
void write_comparison(const std::vector<MethodRun>& runs, const fs::path& out_dir, std::ostream& log) {
    double j_best = std::numeric_limits<double>::infinity();
    for (const MethodRun& r : runs) {
        if (const OptimizationResult* o = r.optimization()) j_best = std::min(j_best, o->final_report().total);
    }
    std::ostringstream table;
    table << "method,iterations,initial_J,final_J,iters_to_90pct\n";
    for (const MethodRun& r : runs) {
        const OptimizationResult* o = r.optimization();
        if (!o) continue;
        table << to_string(r.method) << ',' << o->final_report().iteration << ','
              << fmt(o->history.front().total) << ',' << fmt(o->final_report().total) << ','
              << iterations_to_fraction(o->history, j_best, 0.9) << '\n';
    }
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "comparison.csv") << table.str();
    log << table.str();
}

int combine(const std::vector<MethodRun>& runs) {
    int code = kExitOk;
    for (const MethodRun& r : runs) code = std::max(code, r.exit_code);
    return code;
}

}  // namespace

int run_optimize(const ProblemBundle& bundle, const RunOptions& opts, std::ostream& log) {
    for (const std::string& w : bundle.warnings) log << "warning: " << w << '\n';
    std::vector<MethodRun> runs;
    for (Method m : bundle.run.methods) {
        runs.push_back(execute(bundle, m, opts));
        write_run(bundle, runs.back(), opts);
        summarize(runs.back(), log);
    }
    if (runs.size() > 1) write_comparison(runs, opts.out_dir, log);
    return combine(runs);
}

int run_compare(const ProblemBundle& bundle, const RunOptions& opts, std::ostream& log) {
    for (const std::string& w : bundle.warnings) log << "warning: " << w << '\n';
    auto krotov = std::async(std::launch::async, [&] { return execute(bundle, Method::Krotov, opts); });
    auto gradient = std::async(std::launch::async, [&] { return execute(bundle, Method::Gradient, opts); });
    std::vector<MethodRun> runs;
    runs.push_back(krotov.get());
    runs.push_back(gradient.get());
    for (const MethodRun& r : runs) {
        write_run(bundle, r, opts);
        summarize(r, log);
    }
    write_comparison(runs, opts.out_dir, log);
    return combine(runs);
}

int run_oracle(const ProblemBundle& bundle, const OracleOptions& opts, std::ostream& log) {
    const Bounds& bounds = bundle.problem.system.bounds();
    std::vector<double> levels = opts.levels;
    if (levels.empty()) levels = {bounds.lo(), bounds.hi()};
    const std::size_t n = opts.n_steps.value_or(bundle.initial_control.size());
    const double horizon = bundle.initial_control.horizon();

    OracleResult result = [&] {
        try {
            return brute_force_bang_bang(bundle.problem, horizon, n, levels);
        } catch (const InvalidArgument& e) {
            throw ValidationError("levels", e.what());
        }
    }();

    json j;
    j["header"] = header(opts.with_timestamp);
    j["schema"] = kSchemaVersion;
    j["levels"] = levels;
    j["N"] = n;
    j["T"] = horizon;
    j["best_J"] = result.best_cost;
    j["best_control"] = std::vector<double>(result.best.values().begin(), result.best.values().end());
    j["optima_count"] = result.optima_count;
    j["evaluated"] = result.evaluated;
    log << "oracle: best J " << fmt(result.best_cost) << " over " << result.evaluated
        << " controls, " << result.optima_count << " optima\n";
    if (opts.method_report) {
        std::ifstream in(*opts.method_report);
        if (!in) throw ParseError("cannot open method report " + opts.method_report->string());
        json rep;
        try {
            rep = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed method report: ") + e.what());
        }
        if (!rep.contains("iterations") || rep["iterations"].empty()) {
            throw ValidationError("report.iterations", "method report has no iterations");
        }
        const double j_method = rep["iterations"].back().at("J").get<double>();
        j["J_method"] = j_method;
        j["gap"] = j_method - result.best_cost;
        log << "gap J_method - J_oracle = " << fmt(j_method - result.best_cost) << '\n';
    }
    j["exit_status"] = kExitOk;
    fs::create_directories(opts.out_dir);
    std::ofstream(opts.out_dir / "oracle.json") << j.dump(2) << '\n';
    return kExitOk;
}

int run_check(const ProblemBundle& bundle, std::ostream& log) {
    const ControlProblem& p = bundle.problem;
    const BilinearSystem& sys = p.system;
    log << "dimension " << sys.dim() << ", bounds [" << fmt(sys.bounds().lo()) << ", "
        << fmt(sys.bounds().hi()) << "], T " << fmt(bundle.initial_control.horizon()) << ", N "
        << bundle.initial_control.size() << '\n';
    log << "|H0| " << fmt(sys.h0().norm()) << ", |H1| " << fmt(sys.h1().norm()) << ", |[H0,H1]| "
        << fmt(sys.drift_commutator().cwiseAbs().maxCoeff()) << " (max entry)\n";
    log << "terminal operator: min eigenvalue " << fmt(p.objective.terminal.min_eigenvalue())
        << (p.objective.terminal_is_psd() ? " (PSD)" : " (not PSD: gradient method only)")
        << (is_projector(p.objective.terminal) ? ", projector" : "") << '\n';

    const StateTrajectory traj = propagate_forward(sys, bundle.initial_control, p.psi0);
    const CostBreakdown c = evaluate(p, bundle.initial_control, traj);
    log << "initial control: I " << fmt(c.terminal) << ", J " << fmt(c.total) << ", z(T) "
        << fmt(c.energy) << ", norm drift " << fmt(c.max_norm_drift) << '\n';

    const double k1_tol = bundle.run.optimizer.krotov.singular.resolved_k1_tol(p);
    const CVector chi_T = p.objective.terminal.matrix() * traj.final_state();
    const TerminalCheck tc = check_terminal_nonsingular(chi_T, traj.final_state(), sys, k1_tol);
    log << "K1(T) " << fmt(tc.k1) << " (k1_tol " << fmt(k1_tol) << ")\n";
    if (tc.warning) {
        log << "warning: terminal switching function vanishes; improvement from this control may stall\n";
    }
    for (const std::string& w : bundle.warnings) log << "warning: " << w << '\n';
    return kExitOk;
}

}  // namespace qctl::cli
