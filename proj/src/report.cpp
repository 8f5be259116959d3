#include "apos/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "apos/classify.hpp"
#include "apos/models.hpp"
#include "apos/special.hpp"
#include "apos/spectral.hpp"

namespace apos {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void emit(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    if (j.is_number_float()) {
        out += format_double(j.get<double>());
    } else if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            emit(it.value(), out, indent + 2);
        }
        out += "\n" + close + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const Json& v : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += pad;
            emit(v, out, indent + 2);
        }
        out += flat ? "]" : "\n" + close + "]";
    } else {
        out += j.dump();
    }
}

Json number_or_null(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }
Json bool_or_null(std::optional<bool> v) { return v ? Json(*v) : Json(nullptr); }
Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json tool_json() { return Json{{"name", kToolName}, {"version", kToolVersion}}; }

void check_keys(const Json& request, const std::set<std::string>& allowed, const char* what) {
    if (!request.is_object()) throw UsageError(std::string(what) + ": request must be a JSON object");
    for (auto it = request.begin(); it != request.end(); ++it)
        if (!allowed.count(it.key())) throw UsageError(std::string(what) + ": unknown option '" + it.key() + "'");
}

ModelParams read_params(const Json& request) {
    ModelParams params;
    if (!request.contains("params")) return params;
    const Json& p = request.at("params");
    if (!p.is_object()) throw UsageError("params must be an object of numbers");
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (!it.value().is_number()) throw UsageError("parameter '" + it.key() + "' is not a number");
        params[it.key()] = it.value().get<double>();
    }
    return params;
}

Json params_json(const std::map<std::string, double>& params) {
    Json out = Json::object();
    for (const auto& [k, v] : params) out[k] = v;
    return out;
}

Json matrix_json(const ComplexMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return Json{{"n", m.rows()}, {"re", re}, {"im", im}};
}

std::string string_option(const Json& request, const char* key) {
    const Json& v = request.at(key);
    if (!v.is_string()) throw UsageError(std::string(key) + " must be a string");
    return v.get<std::string>();
}

double number_option(const Json& request, const char* key) {
    const Json& v = request.at(key);
    if (!v.is_number()) throw UsageError(std::string(key) + " must be a number");
    return v.get<double>();
}

RealVector json_vector(const Json& j, const char* what) {
    if (!j.is_array()) throw UsageError(std::string(what) + " must be an array of numbers");
    RealVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw UsageError(std::string(what) + " must be an array of numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

// Interior nodes x_i = (i+1)/(n+1) of the unit interval.
RealVector interior_distance(Eigen::Index n) {
    RealVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) / static_cast<double>(n + 1);
        d(i) = std::min(x, 1.0 - x);
    }
    return d;
}

void apply_lattice_overrides(const Json& request, LatticeContext& ctx, std::string& u_label) {
    if (request.contains("p")) ctx.p = exponent_from_string(string_option(request, "p"));
    if (request.contains("u")) {
        const std::string u = string_option(request, "u");
        u_label = u;
        if (u == "ones") {
            ctx.u = RealVector::Ones(ctx.n);
        } else if (u == "dist") {
            ctx.u = interior_distance(ctx.n);
        } else if (u == "dist2") {
            ctx.u = interior_distance(ctx.n).array().square().matrix();
        } else {
            const Json j = read_json_file(u);
            ctx.u = json_vector(j.is_object() && j.contains("u") ? j.at("u") : j, "u");
            u_label = "file";
        }
    }
    ctx.validate();
}

Json spectrum_json(const SpectrumReport& rep) {
    constexpr std::size_t kShown = 20;
    Json clusters = Json::array();
    for (std::size_t c = 0; c < std::min(kShown, rep.clusters.size()); ++c) {
        const EigenvalueCluster& cl = rep.clusters[c];
        clusters.push_back(Json{{"center", complex_json(cl.center)},
                                {"algebraic_multiplicity", cl.algebraic_multiplicity},
                                {"geometric_multiplicity", cl.geometric_multiplicity},
                                {"pole_order", cl.pole_order}});
    }
    Json peripheral = Json::array();
    for (std::size_t c : rep.peripheral) peripheral.push_back(c);
    return Json{{"size", rep.schur.size()},
                {"spectral_bound", rep.spectral_bound},
                {"dominant", rep.dominant},
                {"dominance_margin", rep.dominance_margin},
                {"ambiguous_clustering", rep.ambiguous_clustering},
                {"norm1", rep.norm},
                {"cluster_count", rep.clusters.size()},
                {"peripheral", peripheral},
                {"leading_clusters", clusters}};
}

Json certificate_json(const PositivityCertificate& c) {
    return Json{{"kind", to_string(c.kind)},
                {"constant", c.constant},
                {"witness_index", c.witness_index},
                {"entrywise_positive", c.entrywise_positive}};
}

Json projection_json(const ProjectionVerdict& v) {
    const EigenConditions& e = v.eigen_conditions;
    Json out{{"eigenvalue", complex_json(v.eigenvalue)},
             {"positive", v.positive},
             {"strongly_positive_wrt_u", v.strongly_positive_wrt_u},
             {"irreducible_rank1", v.irreducible_rank1},
             {"pole_order", v.pole_order},
             {"faces_agree", v.faces_agree},
             {"eigen_conditions",
              Json{{"geom_simple", e.geom_simple},
                   {"alg_simple", e.alg_simple},
                   {"eigvec_strongly_pos", e.eigvec_strongly_pos},
                   {"left_eigvec_strictly_pos", e.left_eigvec_strictly_pos},
                   {"range_meets_cone_trivially", bool_or_null(e.range_meets_cone_trivially)}}},
             {"certificate", certificate_json(v.certificate)},
             {"min_entry", v.P.real().minCoeff()},
             {"max_entry", v.P.real().maxCoeff()},
             {"relative_imag", relative_imag(v.P)}};
    if (v.P.rows() <= 16) out["P"] = matrix_json(v.P);
    return out;
}

Json semigroup_json(const SemigroupClassification& c) {
    return Json{{"verdict", to_string(c.verdict)},
                {"theorem_basis", c.theorem_basis},
                {"positive", c.positive},
                {"eventually_strongly_positive", c.eventually_strongly_positive},
                {"asymptotically_positive", c.asymptotically_positive},
                {"eventually_positive", c.eventually_positive},
                {"positivity_audit_agrees", c.positivity_audit_agrees},
                {"spectral_bound", c.spectral_bound},
                {"dominant", c.dominant},
                {"bounded_rescaled", c.bounded_rescaled},
                {"dominance_margin", c.dominance_margin}};
}

Json witnesses_json(const SemigroupWitnesses& w) {
    Json idx = Json::array();
    Json t0 = Json::array();
    Json strong = Json::array();
    for (Eigen::Index i : w.basis_indices) idx.push_back(i);
    for (const auto& t : w.t0_per_basis_vector) t0.push_back(number_or_null(t));
    for (const auto& t : w.strong_t0_per_basis_vector) strong.push_back(number_or_null(t));
    return Json{{"basis_indices", idx},
                {"t0_per_basis_vector", t0},
                {"strong_t0_per_basis_vector", strong},
                {"sup_tail_distance", w.sup_tail_distance},
                {"bounded_rescaled", w.bounded_rescaled}};
}

Json samples_json(const std::vector<ResolventSample>& samples) {
    Json out = Json::array();
    for (const ResolventSample& s : samples)
        out.push_back(Json{{"lambda", s.lambda}, {"min_constant", s.min_constant}, {"max_distance", s.max_distance}});
    return out;
}

Json resolvent_json(const ResolventClassification& r) {
    return Json{{"verdict", to_string(r.verdict)},
                {"theorem_basis", r.theorem_basis},
                {"simple_pole", r.simple_pole},
                {"right_strongly_positive", r.right_strongly_positive},
                {"left_strongly_negative", r.left_strongly_negative},
                {"right_positive", r.right_positive},
                {"scaled_distance_vanishes", r.scaled_distance_vanishes},
                {"bounded_type", r.bounded_type},
                {"lambda1", number_or_null(r.lambda1)},
                {"right_samples", samples_json(r.right_samples)},
                {"left_samples", samples_json(r.left_samples)}};
}

Json prediction_json(const Prediction& p) {
    return Json{{"positive", bool_or_null(p.positive)},
                {"eventually_strongly_positive", bool_or_null(p.eventually_strongly_positive)},
                {"asymptotically_positive", bool_or_null(p.asymptotically_positive)},
                {"projection_strongly_positive", bool_or_null(p.projection_strongly_positive)},
                {"resolvent_eventually_positive", bool_or_null(p.resolvent_eventually_positive)},
                {"note", p.note}};
}

std::uint64_t seed_option(const Json& request) {
    if (!request.contains("seed")) return 0;
    const Json& s = request.at("seed");
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw UsageError("seed must be a non-negative integer");
    return s.get<std::uint64_t>();
}

Rect rect_option(const Json& request, const Rect& fallback) {
    if (!request.contains("rect")) return fallback;
    const RealVector v = json_vector(request.at("rect"), "rect");
    if (v.size() != 4) throw UsageError("rect needs four numbers reL,reR,imB,imT");
    const Rect r{v(0), v(1), v(2), v(3)};
    if (!(r.re_min < r.re_max && r.im_min < r.im_max)) throw UsageError("rect must have reL < reR and imB < imT");
    return r;
}

double param_or(const ModelParams& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void allow_params(const ModelParams& params, const std::set<std::string>& allowed, const std::string& what) {
    for (const auto& [k, v] : params)
        if (!allowed.count(k)) throw UsageError(what + ": unknown parameter '" + k + "'");
}

int integer_param(const ModelParams& params, const std::string& key, int fallback) {
    const double v = param_or(params, key, fallback);
    if (v != std::floor(v) || v < 1 || v > 1e7) throw UsageError("parameter " + key + " must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

std::string format_json(const Json& j) {
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

ComplexMatrix parse_matrix_json(const Json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("re"))
        throw UsageError("matrix file must have the form {\"n\": int, \"re\": [...], \"im\": [...]}");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "n" && it.key() != "re" && it.key() != "im")
            throw UsageError("matrix file: unknown key '" + it.key() + "'");
    if (!j.at("n").is_number_integer() || j.at("n").get<std::int64_t>() < 1)
        throw UsageError("matrix file: n must be a positive integer");
    const auto n = static_cast<Eigen::Index>(j.at("n").get<std::int64_t>());
    const RealVector re = json_vector(j.at("re"), "matrix re");
    const RealVector im = j.contains("im") ? json_vector(j.at("im"), "matrix im") : RealVector::Zero(n * n);
    if (re.size() != n * n || im.size() != n * n) throw UsageError("matrix file: re and im need n*n entries");
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) a(i, k) = Complex(re(i * n + k), im(i * n + k));
    if (!a.allFinite()) throw UsageError("matrix file: entries must be finite");
    return a;
}

ComplexMatrix read_matrix_file(const std::string& path) { return parse_matrix_json(read_json_file(path)); }

Json analyze(const Json& request) {
    check_keys(request, {"model", "params", "matrix", "u", "p", "tol_cluster", "seed"}, "analyze");
    const ModelParams params = read_params(request);
    ModelBundle m;
    std::string source = "registry";
    if (request.contains("matrix")) {
        if (request.contains("model")) throw UsageError("analyze: give either a model or a matrix file");
        if (!params.empty()) throw UsageError("analyze: parameters apply to named models only");
        m.name = "matrix";
        m.A = read_matrix_file(string_option(request, "matrix"));
        m.ctx = LatticeContext::ones(m.A.rows(), Exponent::Inf);
        source = "matrix-file";
    } else if (request.contains("model")) {
        m = make_model(string_option(request, "model"), params);
        if (m.simulator_backed()) throw UsageError("analyze: " + m.name + " is simulator-backed; use simulate");
    } else {
        throw UsageError("analyze: a model name or a matrix file is required");
    }
    std::string u_label = m.ctx.u ? "model" : "none";
    apply_lattice_overrides(request, m.ctx, u_label);
    const std::uint64_t seed = seed_option(request);

    ClassifyOptions opts;
    opts.tol_cluster = m.tol_cluster;
    if (request.contains("tol_cluster")) {
        const double tol = number_option(request, "tol_cluster");
        if (!(tol > 0.0)) throw UsageError("tol_cluster must be positive");
        opts.tol_cluster = tol;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < 2; ++k) {
        RealVector v(m.A.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uni(rng);
        opts.test_vectors.push_back(v);
    }

    const SpectrumReport rep = spectrum_report(m.A, opts.tol_cluster);
    const SemigroupClassification sg = classify_semigroup(m.A, m.ctx, opts);
    const auto lead = rep.leading_real_cluster();
    Json projection = nullptr;
    if (sg.projection) {
        projection = projection_json(*sg.projection);
    } else if (lead) {
        projection = projection_json(check_projection(m.A, rep, *lead, m.ctx));
    }
    Json resolvent = nullptr;
    if (lead) resolvent = resolvent_json(classify_resolvent(m.A, rep.clusters[*lead].center.real(), m.ctx, opts));

    const double horizon = std::isfinite(rep.dominance_margin) && rep.dominance_margin > 0.0
                               ? 200.0 / rep.dominance_margin
                               : 200.0;
    Json out;
    out["tool"] = tool_json();
    out["model"] = Json{{"name", m.name}, {"source", source}, {"params", params_json(m.params)}, {"size", m.A.rows()}};
    out["seed"] = seed;
    out["lattice"] = Json{{"p", to_string(m.ctx.p)}, {"u", u_label}, {"quasi_interior_u", m.ctx.has_quasi_interior_u()}};
    out["tolerances"] = Json{{"tol_cluster", rep.tol_cluster},
                             {"tol_strict", m.ctx.u ? Json(m.ctx.tol_strict()) : Json(nullptr)},
                             {"eps", opts.eps},
                             {"t_grid_horizon", horizon},
                             {"max_witness_vectors", opts.max_witness_vectors},
                             {"resolvent_samples", opts.resolvent_samples},
                             {"resolvent_delta", number_or_null(opts.resolvent_delta)}};
    out["spectrum"] = spectrum_json(rep);
    out["projection"] = projection;
    out["classification"] = Json{{"semigroup", semigroup_json(sg)}, {"resolvent", resolvent}};
    out["witnesses"] = witnesses_json(sg.witnesses);
    out["predicted"] = m.name == "matrix" ? Json(nullptr) : prediction_json(m.predicted);
    return out;
}

SimulationTrace simulate(const Json& request) {
    check_keys(request, {"model", "params", "T", "step", "init", "record_every"}, "simulate");
    if (!request.contains("model")) throw UsageError("simulate: a model is required");
    if (!request.contains("T")) throw UsageError("simulate: T is required");
    const std::string model = string_option(request, "model");
    const ModelParams params = read_params(request);
    const double t_end = number_option(request, "T");
    const std::string init = request.contains("init") ? string_option(request, "init") : "";
    SimulationOptions opts;
    if (request.contains("record_every")) {
        const Json& r = request.at("record_every");
        if (!r.is_number_integer() || r.get<std::int64_t>() < 1) throw UsageError("record_every must be a positive integer");
        opts.record_every = static_cast<int>(r.get<std::int64_t>());
    }

    // Step and CFL checks inside the simulators are numerical failures.
    const auto run = [](const auto& body) {
        try {
            return body();
        } catch (const UsageError& e) {
            throw NumericalFailure("simulate", e.what());
        }
    };

    if (model == "delay") {
        allow_params(params, {}, "delay");
        if (!request.contains("step")) throw UsageError("simulate: delay needs --step");
        const double h = number_option(request, "step");
        if (init.empty() || init == "hat") {
            return run([&] { return simulate_delay(hat_function(-1.0, 0.2), t_end, h, opts); });
        }
        if (init == "constant") {
            return run([&] { return simulate_delay([](double) { return 1.0; }, t_end, h, opts); });
        }
        const Json j = read_json_file(init);
        const RealVector history = json_vector(j.is_object() && j.contains("history") ? j.at("history") : j, "history");
        return run([&] { return simulate_delay(history, t_end, h, opts); });
    }
    if (model == "network_flow") {
        allow_params(params, {"l", "N"}, "network_flow");
        const double l = param_or(params, "l", std::numbers::sqrt2);
        const int n = integer_param(params, "N", 256);
        if (!(l > 0.0)) throw UsageError("network_flow: l must be positive");
        const double dt = request.contains("step") ? number_option(request, "step") : 1.0 / n;
        GraphState state;
        if (init.empty() || init == "bump") {
            state = graph_bump_state(l, n, 0.5, 0.05);
        } else if (init == "fixed") {
            state = graph_fixed_state(l, n);
        } else {
            const Json j = read_json_file(init);
            state = graph_state(l, n);
            const char* keys[] = {"f1", "f2", "f3"};
            for (std::size_t e = 0; e < 3; ++e) {
                if (!j.contains(keys[e])) throw UsageError(std::string("network init file needs ") + keys[e]);
                const RealVector v = json_vector(j.at(keys[e]), keys[e]);
                if (v.size() != state.f[e].size())
                    throw UsageError(std::string(keys[e]) + " must have " + std::to_string(state.f[e].size()) + " cells");
                state.f[e] = v;
            }
        }
        return run([&] { return simulate_graph_flow(state, t_end, dt, opts); });
    }
    throw UsageError("simulate: model must be delay or network_flow");
}

std::string trace_to_csv(const SimulationTrace& trace) {
    std::string out = "t,d_plus,min_value";
    for (const auto& [name, values] : trace.functionals) out += "," + name;
    out += "\n";
    char buf[40];
    const auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        out += cell(trace.times[k]) + "," + cell(trace.d_plus[k]) + "," + cell(trace.min_value[k]);
        for (const auto& [name, values] : trace.functionals) out += "," + cell(values[k]);
        out += "\n";
    }
    return out;
}

Json roots(const Json& request) {
    check_keys(request, {"function", "rect", "params"}, "roots");
    if (!request.contains("function")) throw UsageError("roots: a function is required");
    const std::string name = string_option(request, "function");
    const ModelParams params = read_params(request);
    CharFunction f;
    Rect rect;
    if (name == "delay_char") {
        allow_params(params, {}, name);
        f = delay_characteristic();
        rect = rect_option(request, {-0.01, 2.0, -60.0, 60.0});
    } else if (name == "network_char") {
        allow_params(params, {"l"}, name);
        f = network_characteristic(param_or(params, "l", std::numbers::sqrt2));
        rect = rect_option(request, {-0.05, 1.0, -40.0, 40.0});
    } else if (name == "bose_k0") {
        allow_params(params, {"q0"}, name);
        const double q0 = param_or(params, "q0", 1.0);
        if (!(q0 > 0.0)) throw UsageError("bose_k0: q0 must be positive");
        f = bose_characteristic(0, q0);
        const double j01 = bessel_zero(0, 1);
        rect = rect_option(request, {0.0, j01 * j01, -1.0, 1.0});
    } else {
        throw UsageError("roots: function must be delay_char, network_char or bose_k0");
    }
    const RootSet set = find_roots(f, rect);
    Json found = Json::array();
    for (const RefinedRoot& r : set.roots)
        found.push_back(Json{{"value", complex_json(r.value)}, {"residual", r.residual}, {"multiplicity", r.multiplicity}});
    Json rejected = Json::array();
    for (const RejectedSeed& r : set.rejected)
        rejected.push_back(Json{{"seed", complex_json(r.seed)}, {"last", complex_json(r.last)}, {"reason", r.reason}});
    Json out;
    out["tool"] = tool_json();
    out["function"] = name;
    out["params"] = params_json(params);
    out["rect"] = Json::array({rect.re_min, rect.re_max, rect.im_min, rect.im_max});
    out["count_by_argument"] = set.count_by_argument;
    out["mismatch"] = set.mismatch;
    out["roots"] = found;
    out["rejected"] = rejected;
    return out;
}

Json certify_report(const std::vector<CriterionResult>& results) {
    Json criteria = Json::array();
    bool all = true;
    for (const CriterionResult& r : results) {
        all = all && r.passed;
        criteria.push_back(Json{{"id", r.id},
                                {"name", r.name},
                                {"passed", r.passed},
                                {"seconds", r.seconds},
                                {"budget_seconds", r.budget_seconds},
                                {"detail", r.detail}});
    }
    return Json{{"tool", tool_json()}, {"all_passed", all}, {"criteria", criteria}};
}

Json error_report(const std::string& kind, const std::string& message, const std::string& where, double value) {
    Json err{{"kind", kind}, {"message", message}};
    if (!where.empty()) err["where"] = where;
    if (value != 0.0) err["value"] = value;
    return Json{{"tool", tool_json()}, {"error", err}};
}

}  // namespace apos
