#include "problem.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qctl/objective.hpp"

namespace qctl::cli {

using nlohmann::json;

ValidationError::ValidationError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field)) {}

namespace {

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

double number(const json& obj, const char* key, const std::string& field,
              std::optional<double> fallback = std::nullopt) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ValidationError(field, "missing required number");
    }
    if (!v->is_number()) throw ValidationError(field, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ValidationError(field, "must be finite");
    return x;
}

long long integer(const json& obj, const char* key, const std::string& field,
                  std::optional<long long> fallback = std::nullopt) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ValidationError(field, "missing required integer");
    }
    if (!v->is_number_integer()) throw ValidationError(field, "expected an integer");
    return v->get<long long>();
}

double positive(const json& obj, const char* key, const std::string& field, double fallback) {
    const double x = number(obj, key, field, fallback);
    if (!(x > 0.0)) throw ValidationError(field, "must be > 0");
    return x;
}

std::vector<double> real_vector(const json& v, const std::string& field, Eigen::Index n) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
        throw ValidationError(field, "expected an array of length " + std::to_string(n));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number()) throw ValidationError(field, "expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

CVector complex_vector(const json& doc, const char* re_key, const char* im_key, Eigen::Index n) {
    const json* re = find(doc, re_key);
    if (!re) throw ValidationError(re_key, "missing");
    const std::vector<double> r = real_vector(*re, re_key, n);
    std::vector<double> i(static_cast<std::size_t>(n), 0.0);
    if (const json* im = find(doc, im_key)) i = real_vector(*im, im_key, n);
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(r[k], i[k]);
    return v;
}

CMatrix real_matrix(const json& v, const std::string& field, Eigen::Index n) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
        throw ValidationError(field, "expected " + std::to_string(n) + " rows");
    }
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::vector<double> row = real_vector(v[r], field, n);
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[c];
    }
    return m;
}

HermitianOperator hermitian_field(const json& obj, const std::string& prefix, const char* re_key,
                                  const char* im_key, Eigen::Index n) {
    const std::string re_field = prefix + re_key;
    const json* re = find(obj, re_key);
    if (!re) throw ValidationError(re_field, "missing");
    CMatrix m = real_matrix(*re, re_field, n);
    if (const json* im = find(obj, im_key)) {
        m += Complex(0.0, 1.0) * real_matrix(*im, prefix + im_key, n);
    }
    try {
        return validate_hermitian(std::move(m));
    } catch (const NonHermitian& e) {
        throw ValidationError(re_field, e.what());
    }
}

SingularPolicy parse_policy(const std::string& s) {
    if (s == "stay_until_saturation") return SingularPolicy::StayUntilSaturation;
    if (s == "always_leave_low") return SingularPolicy::AlwaysLeaveLow;
    if (s == "always_leave_high") return SingularPolicy::AlwaysLeaveHigh;
    throw ValidationError("singular.policy", "unknown policy '" + s + "'");
}

const json& object_or_empty(const json& doc, const char* key) {
    static const json empty = json::object();
    const json* v = find(doc, key);
    if (!v) return empty;
    if (!v->is_object()) throw ValidationError(key, "expected an object");
    return *v;
}

ProblemBundle build(const json& doc) {
    if (!doc.is_object()) throw ParseError("problem file must hold a JSON object");
    const long long schema = integer(doc, "schema", "schema");
    if (schema != kSchemaVersion) {
        throw ValidationError("schema", "unsupported version " + std::to_string(schema));
    }
    const long long dim_raw = integer(doc, "dim", "dim");
    if (dim_raw < 1) throw ValidationError("dim", "must be >= 1");
    const auto n = static_cast<Eigen::Index>(dim_raw);

    HermitianOperator h0 = hermitian_field(doc, "", "h0_re", "h0_im", n);
    HermitianOperator h1 = hermitian_field(doc, "", "h1_re", "h1_im", n);

    CVector psi0 = complex_vector(doc, "psi0_re", "psi0_im", n);
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-12) {
        throw ValidationError("psi0", "psi0 not normalized (|psi0|^2 = " +
                                          std::to_string(psi0.squaredNorm()) + ")");
    }

    // control
    const json* control = find(doc, "control");
    if (!control || !control->is_object()) throw ValidationError("control", "missing object");
    const double a = number(*control, "a", "control.a");
    const double b = number(*control, "b", "control.b");
    if (!(a < b)) throw ValidationError("control.a", "bounds require a < b");
    const double horizon = number(*control, "T", "control.T");
    if (!(horizon > 0.0)) throw ValidationError("control.T", "must be > 0");
    const long long steps = integer(*control, "N", "control.N");
    if (steps < 1) throw ValidationError("control.N", "must be >= 1");
    const Bounds bounds(a, b);
    BilinearSystem system(std::move(h0), std::move(h1), bounds);

    RunConfig run;
    std::vector<double> u0;
    const json& init = object_or_empty(*control, "init");
    const std::string kind = init.value("type", std::string("constant"));
    if (kind == "constant") {
        run.init = InitKind::Constant;
        const double value = number(init, "value", "control.init.value", bounds.clip(0.0));
        if (!bounds.contains(value)) throw ValidationError("control.init.value", "outside [a,b]");
        u0.assign(static_cast<std::size_t>(steps), value);
    } else if (kind == "random") {
        run.init = InitKind::Random;
        const long long seed = integer(init, "seed", "control.init.seed");
        if (seed < 0) throw ValidationError("control.init.seed", "must be >= 0");
        const double amplitude = number(init, "amplitude", "control.init.amplitude", 1.0);
        if (!(amplitude > 0.0 && amplitude <= 1.0)) {
            throw ValidationError("control.init.amplitude", "must be in (0, 1]");
        }
        run.seed = static_cast<std::uint64_t>(seed);
        u0 = random_control_values(*run.seed, amplitude, a, b, static_cast<std::size_t>(steps));
    } else if (kind == "provided") {
        run.init = InitKind::Provided;
        const json* values = find(init, "values");
        if (!values) throw ValidationError("control.init.values", "missing");
        u0 = real_vector(*values, "control.init.values", static_cast<Eigen::Index>(steps));
        for (double u : u0) {
            if (!bounds.contains(u)) throw ValidationError("control.init.values", "outside [a,b]");
        }
    } else {
        throw ValidationError("control.init.type", "unknown init type '" + kind + "'");
    }

    // method
    const std::string method = doc.value("method", std::string("krotov"));
    if (method == "krotov") {
        run.methods = {Method::Krotov};
    } else if (method == "gradient") {
        run.methods = {Method::Gradient};
    } else if (method == "both") {
        run.methods = {Method::Krotov, Method::Gradient};
    } else {
        throw ValidationError("method", "expected krotov, gradient or both");
    }

    // objective
    const json* objective = find(doc, "objective");
    if (!objective || !objective->is_object()) throw ValidationError("objective", "missing object");
    std::optional<HermitianOperator> terminal;
    if (const json* idx = find(*objective, "target_state_indices")) {
        if (!idx->is_array()) throw ValidationError("objective.target_state_indices", "expected array");
        std::vector<int> indices;
        for (const json& i : *idx) {
            if (!i.is_number_integer()) {
                throw ValidationError("objective.target_state_indices", "expected integers");
            }
            indices.push_back(i.get<int>());
        }
        try {
            terminal = projector_from_indices(indices, n);
        } catch (const Error& e) {
            throw ValidationError("objective.target_state_indices", e.what());
        }
    } else if (find(*objective, "L_re")) {
        terminal = hermitian_field(*objective, "objective.", "L_re", "L_im", n);
    } else {
        throw ValidationError("objective", "needs target_state_indices or L_re/L_im");
    }
    if (objective->value("complement", false)) {
        try {
            terminal = complement(*terminal);
        } catch (const NotProjector& e) {
            throw ValidationError("objective.complement", e.what());
        }
    }
    const double beta = number(*objective, "beta", "objective.beta", 0.0);
    if (!(beta >= 0.0)) throw ValidationError("objective.beta", "must be >= 0");
    if (const json* cap = find(*objective, "energy_cap")) {
        if (!cap->is_number() || !(cap->get<double>() > 0.0)) {
            throw ValidationError("objective.energy_cap", "must be a positive number");
        }
        run.energy_cap = cap->get<double>();
    }
    Objective obj(std::move(*terminal), beta, run.energy_cap);

    std::vector<std::string> warnings;
    if (!obj.terminal_is_psd()) {
        for (Method m : run.methods) {
            if (m == Method::Krotov) {
                throw ValidationError("objective.L",
                                      "Krotov runs require a positive semidefinite terminal operator");
            }
        }
        warnings.push_back("terminal operator is not positive semidefinite");
    }

    // run settings
    OptimizerConfig& opt = run.optimizer;
    const long long iterations = integer(doc, "iterations", "iterations", 100);
    if (iterations < 0) throw ValidationError("iterations", "must be >= 0");
    opt.max_iterations = static_cast<int>(iterations);

    const json& stop = object_or_empty(doc, "stop");
    opt.j_tol = positive(stop, "J_tol", "stop.J_tol", opt.j_tol);
    opt.grad_tol = positive(stop, "grad_tol", "stop.grad_tol", opt.grad_tol);

    const json& singular = object_or_empty(doc, "singular");
    if (find(singular, "k1_tol")) {
        opt.krotov.singular.k1_tol = positive(singular, "k1_tol", "singular.k1_tol", 1.0);
    }
    opt.krotov.singular.denom_tol =
        positive(singular, "denom_tol", "singular.denom_tol", opt.krotov.singular.denom_tol);
    opt.krotov.singular.policy =
        parse_policy(singular.value("policy", std::string("stay_until_saturation")));

    const json& krotov = object_or_empty(doc, "krotov");
    opt.krotov.mono_tol = positive(krotov, "mono_tol", "krotov.mono_tol", opt.krotov.mono_tol);
    const long long damp_max = integer(krotov, "damp_max", "krotov.damp_max", opt.krotov.damp_max);
    if (damp_max < 0) throw ValidationError("krotov.damp_max", "must be >= 0");
    opt.krotov.damp_max = static_cast<int>(damp_max);

    const json& ls = object_or_empty(doc, "line_search");
    opt.line_search.eps0 = positive(ls, "eps0", "line_search.eps0", opt.line_search.eps0);
    opt.line_search.shrink = number(ls, "shrink", "line_search.shrink", opt.line_search.shrink);
    if (!(opt.line_search.shrink > 0.0 && opt.line_search.shrink < 1.0)) {
        throw ValidationError("line_search.shrink", "must be in (0,1)");
    }
    const long long trials = integer(ls, "max_trials", "line_search.max_trials", opt.line_search.max_trials);
    if (trials < 1) throw ValidationError("line_search.max_trials", "must be >= 1");
    opt.line_search.max_trials = static_cast<int>(trials);

    ControlProblem problem(std::move(system), std::move(obj), std::move(psi0));
    ControlProgram initial(horizon, std::move(u0));
    return ProblemBundle{std::move(problem), std::move(initial), std::move(run), doc.dump(),
                         std::move(warnings)};
}

}  // namespace

std::vector<double> random_control_values(std::uint64_t seed, double amplitude, double a,
                                          double b, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<double> u(n);
    const double width = amplitude * (b - a);
    for (double& x : u) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x = a + width * unit;
    }
    return u;
}

ProblemBundle parse_problem_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    try {
        return build(doc);
    } catch (const json::exception& e) {
        throw ParseError(std::string("unexpected JSON structure: ") + e.what());
    }
}

ProblemBundle parse_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

}  // namespace qctl::cli
