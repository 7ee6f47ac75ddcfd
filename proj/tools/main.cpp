#include <iostream>

#include <CLI11/CLI11.hpp>

#include "runner.hpp"

namespace {

using namespace qctl::cli;

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const qctl::BudgetExceeded& e) {
        std::cerr << "oracle budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative improvement of controls for bilinear Schroedinger systems"};
    app.require_subcommand(1);

    std::string file;
    RunOptions run_opts;
    std::string out_dir = "qctl_out";
    bool no_timestamp = false;

    auto* optimize = app.add_subcommand("optimize", "Run the configured improver(s)");
    optimize->add_option("file", file, "Problem JSON")->required()->check(CLI::ExistingFile);
    optimize->add_option("--out", out_dir, "Output directory");
    optimize->add_flag("--trace-controls", run_opts.trace_controls, "Write per-iteration controls");
    optimize->add_flag("--refine-on-failure", run_opts.refine_on_failure,
                       "Halve dt and retry when a Krotov step cannot keep monotonicity");
    optimize->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp from reports");

    auto* compare = app.add_subcommand("compare", "Run both methods and tabulate convergence");
    compare->add_option("file", file, "Problem JSON")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "Output directory");
    compare->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp from reports");

    OracleOptions oracle_opts;
    std::size_t oracle_n = 0;
    std::string method_report;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive piecewise-constant search");
    oracle->add_option("file", file, "Problem JSON")->required()->check(CLI::ExistingFile);
    oracle->add_option("--levels", oracle_opts.levels, "Control levels (default: a,b)")->delimiter(',');
    oracle->add_option("--n", oracle_n, "Number of intervals (default: problem N)");
    oracle->add_option("--report", method_report, "Optimize report.json to compare against");
    oracle->add_option("--out", out_dir, "Output directory");
    oracle->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp from reports");

    auto* check = app.add_subcommand("check", "Validate a problem file and print diagnostics");
    check->add_option("file", file, "Problem JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    return guarded([&] {
        const ProblemBundle bundle = parse_problem(file);
        run_opts.out_dir = out_dir;
        run_opts.with_timestamp = !no_timestamp;
        if (*optimize) return run_optimize(bundle, run_opts, std::cout);
        if (*compare) return run_compare(bundle, run_opts, std::cout);
        if (*oracle) {
            if (oracle_n > 0) oracle_opts.n_steps = oracle_n;
            if (!method_report.empty()) oracle_opts.method_report = method_report;
            oracle_opts.out_dir = out_dir;
            oracle_opts.with_timestamp = !no_timestamp;
            return run_oracle(bundle, oracle_opts, std::cout);
        }
        return run_check(bundle, std::cout);
    });
}
