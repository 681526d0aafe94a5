#include "basket/config.hpp"

#include <fstream>
#include <set>

#include "basket/errors.hpp"

namespace basket {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config: " + path + ": " + msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
    }
}

double get_number(const json& obj, const std::string& key, double fallback,
                  const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

// Scalar-or-array expansion to one value per indication.
template <typename T>
std::vector<T> expand(const json& obj, const std::string& key, T fallback, std::size_t n,
                      const std::string& path) {
    std::vector<T> out(n, fallback);
    if (!obj.contains(key)) return out;
    const json& v = obj[key];
    if (v.is_array()) {
        if (v.size() != n) fail(path + "." + key, "array length must equal indications");
        for (std::size_t i = 0; i < n; ++i) {
            if (!v[i].is_number()) fail(path + "." + key, "expected numbers");
            out[i] = v[i].get<T>();
        }
    } else if (v.is_number()) {
        out.assign(n, v.get<T>());
    } else {
        fail(path + "." + key, "expected a number or an array");
    }
    return out;
}

DistanceMeasure parse_measure(const std::string& s, const std::string& path) {
    if (s == "b" || s == "bhattacharyya") return DistanceMeasure::bhattacharyya;
    if (s == "h" || s == "hellinger") return DistanceMeasure::hellinger;
    if (s == "kl" || s == "symmetrized_kl") return DistanceMeasure::symmetrized_kl;
    fail(path, "unknown distance measure '" + s + "' (expected b, h, or kl)");
}

std::string measure_name(DistanceMeasure m) {
    switch (m) {
        case DistanceMeasure::bhattacharyya: return "b";
        case DistanceMeasure::hellinger: return "h";
        case DistanceMeasure::symmetrized_kl: return "kl";
    }
    return "?";
}

CorrelationKind parse_correlation(const std::string& s, const std::string& path) {
    if (s == "exponential" || s == "exp") return CorrelationKind::exponential;
    if (s == "squared_exponential" || s == "sqexp") return CorrelationKind::squared_exponential;
    fail(path, "unknown correlation '" + s + "'");
}

std::string correlation_name(CorrelationKind k) {
    return k == CorrelationKind::exponential ? "exponential" : "squared_exponential";
}

ScalarPrior parse_scalar_prior(const json& v, bool gamma_default, const std::string& path) {
    if (v.is_number()) {
        return gamma_default ? ScalarPrior::gamma(v.get<double>())
                             : ScalarPrior::inverse_gamma(v.get<double>(), v.get<double>());
    }
    if (!v.is_object()) fail(path, "expected a number or an object");
    check_keys(v, {"gamma", "ig", "uniform"}, path);
    if (v.size() != 1) fail(path, "expected exactly one of gamma / ig / uniform");
    if (v.contains("gamma")) {
        if (!v["gamma"].is_number()) fail(path + ".gamma", "expected the shape (rate is 1)");
        return ScalarPrior::gamma(v["gamma"].get<double>());
    }
    if (v.contains("ig")) {
        const json& p = v["ig"];
        if (!p.is_array() || p.size() != 2) fail(path + ".ig", "expected [shape, rate]");
        return ScalarPrior::inverse_gamma(p[0].get<double>(), p[1].get<double>());
    }
    const json& p = v["uniform"];
    if (!p.is_array() || p.size() != 2) fail(path + ".uniform", "expected [lo, hi]");
    const double lo = p[0].get<double>(), hi = p[1].get<double>();
    if (!(0.0 < lo && lo < hi)) fail(path + ".uniform", "need 0 < lo < hi");
    return ScalarPrior::uniform(lo, hi);
}

json scalar_prior_json(const ScalarPrior& p) {
    switch (p.kind) {
        case ScalarPrior::Kind::gamma: return json{{"gamma", p.a}};
        case ScalarPrior::Kind::inverse_gamma: return json{{"ig", {p.a, p.b}}};
        case ScalarPrior::Kind::uniform: return json{{"uniform", {p.a, p.b}}};
    }
    return {};
}

// Table-4 sensitivity settings for the correlated model.
void apply_prior_setting(int setting, CbhmParams& p, const std::string& path) {
    switch (setting) {
        case 1:
            p.sigma2 = ScalarPrior::inverse_gamma(0.1, 0.1);
            p.tau2 = ScalarPrior::inverse_gamma(0.1, 0.1);
            p.phi = ScalarPrior::gamma(1.0);
            return;
        case 2:
            p.sigma2 = ScalarPrior::inverse_gamma(0.01, 0.01);
            p.tau2 = ScalarPrior::inverse_gamma(0.01, 0.01);
            p.phi = ScalarPrior::gamma(1.0);
            return;
        case 3:
            p.sigma2 = ScalarPrior::inverse_gamma(0.001, 0.001);
            p.tau2 = ScalarPrior::inverse_gamma(0.001, 0.001);
            p.phi = ScalarPrior::gamma(1.0);
            return;
        case 4:
            p.sigma2 = ScalarPrior::inverse_gamma(0.01, 0.01);
            p.tau2 = ScalarPrior::inverse_gamma(0.01, 0.01);
            p.phi = ScalarPrior::gamma(0.7);
            return;
        default: fail(path, "prior_setting must be 1..4");
    }
}

// Recipe defaults keyed on the distance measure: the squared-exponential /
// KL variant swaps in uniform priors so covariance draws stay well scaled.
void apply_measure_defaults(CbhmParams& p) {
    if (p.measure == DistanceMeasure::symmetrized_kl) {
        p.corr = CorrelationKind::squared_exponential;
        p.phi = ScalarPrior::uniform(0.189, 0.5);
        p.sigma2 = ScalarPrior::uniform(2.0, 3.0);
        p.tau2 = ScalarPrior::uniform(2.0, 4.0);
    } else if (p.measure == DistanceMeasure::hellinger) {
        p.phi = ScalarPrior::gamma(1.5);
    } else {
        p.phi = ScalarPrior::gamma(1.0);
    }
}

MethodConfig parse_method(const json& entry, const std::string& path) {
    json obj;
    if (entry.is_string()) {
        obj = json{{"name", entry.get<std::string>()}};
    } else if (entry.is_object()) {
        obj = entry;
    } else {
        fail(path, "expected a method name or an object");
    }
    check_keys(obj,
               {"name", "label", "measure", "correlation", "prior_setting", "phi_prior",
                "sigma2_prior", "tau2_prior", "variance_prior", "mu0", "lambda1", "lambda2",
                "fixed_pi", "sigma02_trn_var", "mix_prob", "theta0_prior_var", "sigma2_shape",
                "sigma2_rate", "final_cutoff"},
               path);
    MethodConfig mc;
    const std::string name = get_string(obj, "name", "", path);
    if (name.empty()) fail(path + ".name", "method name required");
    mc.spec.method = method_from_name(name);
    mc.label = get_string(obj, "label", name, path);

    if (mc.spec.method == Method::cbhm) {
        CbhmParams& p = mc.spec.cbhm;
        p.measure = parse_measure(get_string(obj, "measure", "b", path), path + ".measure");
        apply_measure_defaults(p);
        if (obj.contains("correlation")) {
            p.corr = parse_correlation(obj["correlation"].get<std::string>(),
                                       path + ".correlation");
        }
        if (obj.contains("prior_setting")) {
            apply_prior_setting(get_int(obj, "prior_setting", 0, path), p,
                                path + ".prior_setting");
        }
        if (obj.contains("phi_prior")) {
            p.phi = parse_scalar_prior(obj["phi_prior"], true, path + ".phi_prior");
        }
        if (obj.contains("variance_prior")) {
            p.sigma2 = parse_scalar_prior(obj["variance_prior"], false, path + ".variance_prior");
            p.tau2 = p.sigma2;
        }
        if (obj.contains("sigma2_prior")) {
            p.sigma2 = parse_scalar_prior(obj["sigma2_prior"], false, path + ".sigma2_prior");
        }
        if (obj.contains("tau2_prior")) {
            p.tau2 = parse_scalar_prior(obj["tau2_prior"], false, path + ".tau2_prior");
        }
        if (obj.contains("mu0")) p.mu0_override = get_number(obj, "mu0", 0.0, path);
    } else if (mc.spec.method == Method::exnex) {
        mc.spec.exnex.lambda1 = get_number(obj, "lambda1", 1.0, path);
        mc.spec.exnex.lambda2 = get_number(obj, "lambda2", 1.0, path);
        mc.spec.exnex.sigma02_trn_var = get_number(obj, "sigma02_trn_var", 0.01, path);
        if (obj.contains("fixed_pi")) {
            mc.spec.exnex.fixed_pi = get_number(obj, "fixed_pi", 0.5, path);
        }
    } else if (mc.spec.method == Method::liu_bhmm) {
        mc.spec.liu.mix_prob = get_number(obj, "mix_prob", 0.5, path);
    } else if (mc.spec.method == Method::bhm) {
        mc.spec.bhm.theta0_prior_var = get_number(obj, "theta0_prior_var", 1000.0, path);
        mc.spec.bhm.sigma2_shape = get_number(obj, "sigma2_shape", 0.001, path);
        mc.spec.bhm.sigma2_rate = get_number(obj, "sigma2_rate", 0.001, path);
    }
    if (obj.contains("final_cutoff")) {
        const double q = get_number(obj, "final_cutoff", 0.0, path);
        if (!(q >= 0.0 && q <= 1.0)) fail(path + ".final_cutoff", "Q must lie in [0,1]");
        mc.final_cutoff = q;
    }
    return mc;
}

json method_json(const MethodConfig& mc) {
    json obj{{"name", method_name(mc.spec.method)}, {"label", mc.label}};
    if (mc.spec.method == Method::cbhm) {
        const CbhmParams& p = mc.spec.cbhm;
        obj["measure"] = measure_name(p.measure);
        obj["correlation"] = correlation_name(p.corr);
        obj["phi_prior"] = scalar_prior_json(p.phi);
        obj["sigma2_prior"] = scalar_prior_json(p.sigma2);
        obj["tau2_prior"] = scalar_prior_json(p.tau2);
        if (p.mu0_override) obj["mu0"] = *p.mu0_override;
    } else if (mc.spec.method == Method::exnex) {
        obj["lambda1"] = mc.spec.exnex.lambda1;
        obj["lambda2"] = mc.spec.exnex.lambda2;
        obj["sigma02_trn_var"] = mc.spec.exnex.sigma02_trn_var;
        if (mc.spec.exnex.fixed_pi) obj["fixed_pi"] = *mc.spec.exnex.fixed_pi;
    } else if (mc.spec.method == Method::liu_bhmm) {
        obj["mix_prob"] = mc.spec.liu.mix_prob;
    } else if (mc.spec.method == Method::bhm) {
        obj["theta0_prior_var"] = mc.spec.bhm.theta0_prior_var;
        obj["sigma2_shape"] = mc.spec.bhm.sigma2_shape;
        obj["sigma2_rate"] = mc.spec.bhm.sigma2_rate;
    }
    if (mc.final_cutoff) obj["final_cutoff"] = *mc.final_cutoff;
    return obj;
}

}  // namespace

RunConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(doc,
               {"scenario", "design", "mcmc", "methods", "liu", "calibration",
                "phi_calibration", "output"},
               "(top)");

    RunConfig rc;
    ScenarioConfig& sc = rc.scenario;

    const json scenario = doc.value("scenario", json::object());
    check_keys(scenario, {"indications", "truth", "q0", "q1", "replicates", "seed", "threads"},
               "scenario");
    const int n_ind = get_int(scenario, "indications", 6, "scenario");
    if (n_ind < 1) fail("scenario.indications", "must be at least 1");
    const auto n = static_cast<std::size_t>(n_ind);
    sc.q0 = expand<double>(scenario, "q0", 0.2, n, "scenario");
    sc.q1 = expand<double>(scenario, "q1", 0.4, n, "scenario");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sc.q0[i] > 0.0 && sc.q0[i] < 1.0) || !(sc.q1[i] > 0.0 && sc.q1[i] < 1.0)) {
            fail("scenario", "rates must lie in (0,1)");
        }
        if (sc.q0[i] >= sc.q1[i]) fail("scenario", "q0 must be below q1 for every indication");
    }
    sc.truth = scenario.contains("truth") ? expand<double>(scenario, "truth", 0.0, n, "scenario")
                                          : sc.q0;
    for (double t : sc.truth) {
        if (!(t > 0.0 && t < 1.0)) fail("scenario.truth", "rates must lie in (0,1)");
    }
    sc.replicates = get_int(scenario, "replicates", 1000, "scenario");
    if (sc.replicates < 1) fail("scenario.replicates", "must be positive");
    sc.seed = 20260808;
    if (scenario.contains("seed")) {
        if (!scenario["seed"].is_number_integer() && !scenario["seed"].is_number_unsigned()) {
            fail("scenario.seed", "expected an integer");
        }
        sc.seed = scenario["seed"].get<std::uint64_t>();
    }
    sc.threads = get_int(scenario, "threads", 2, "scenario");

    const json design = doc.value("design", json::object());
    check_keys(design, {"n1", "n", "interim_cutoff", "final_cutoff", "cutoffs_file"}, "design");
    sc.n1 = expand<int>(design, "n1", 14, n, "design");
    sc.n = expand<int>(design, "n", 24, n, "design");
    for (std::size_t i = 0; i < n; ++i) {
        if (sc.n1[i] <= 0 || sc.n1[i] > sc.n[i]) fail("design", "need 0 < n1 <= n");
    }
    sc.interim_cutoff = get_number(design, "interim_cutoff", 0.05, "design");
    if (!(sc.interim_cutoff >= 0.0 && sc.interim_cutoff < 1.0)) {
        fail("design.interim_cutoff", "Qf must lie in [0,1)");
    }

    const json mcmc = doc.value("mcmc", json::object());
    check_keys(mcmc, {"burn_in", "keep", "adapt_window"}, "mcmc");
    sc.mcmc.burn_in = get_int(mcmc, "burn_in", 5000, "mcmc");
    sc.mcmc.keep = get_int(mcmc, "keep", 10000, "mcmc");
    sc.mcmc.adapt_window = get_int(mcmc, "adapt_window", 50, "mcmc");
    if (sc.mcmc.burn_in < 0) fail("mcmc.burn_in", "must be nonnegative");
    if (sc.mcmc.keep < 1) fail("mcmc.keep", "must be positive");

    json methods = doc.value("methods", json::array({"cbhm"}));
    if (!methods.is_array() || methods.empty()) fail("methods", "expected a nonempty array");
    std::set<std::string> labels;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        MethodConfig mc = parse_method(methods[m], "methods[" + std::to_string(m) + "]");
        if (!labels.insert(mc.label).second) {
            fail("methods[" + std::to_string(m) + "]", "duplicate label '" + mc.label + "'");
        }
        sc.methods.push_back(std::move(mc));
    }

    // Final cutoffs: per-method map, a shared number, or a calibration file.
    if (design.contains("final_cutoff")) {
        const json& fc = design["final_cutoff"];
        if (fc.is_number()) {
            for (auto& mc : sc.methods) {
                if (!mc.final_cutoff) mc.final_cutoff = fc.get<double>();
            }
        } else if (fc.is_object()) {
            for (auto it = fc.begin(); it != fc.end(); ++it) {
                bool matched = false;
                for (auto& mc : sc.methods) {
                    if (mc.label == it.key()) {
                        mc.final_cutoff = it.value().get<double>();
                        matched = true;
                    }
                }
                if (!matched) fail("design.final_cutoff." + it.key(), "no such method label");
            }
        } else {
            fail("design.final_cutoff", "expected a number or a {label: Q} object");
        }
    }
    if (design.contains("cutoffs_file")) {
        const std::string file = get_string(design, "cutoffs_file", "", "design");
        std::ifstream in(file);
        if (!in) fail("design.cutoffs_file", "cannot open '" + file + "'");
        json cutoffs;
        try {
            in >> cutoffs;
        } catch (const json::parse_error& e) {
            fail("design.cutoffs_file", std::string("parse error: ") + e.what());
        }
        for (auto& mc : sc.methods) {
            if (!mc.final_cutoff && cutoffs.contains(mc.label)) {
                mc.final_cutoff = cutoffs[mc.label].get<double>();
            }
        }
    }

    const json liu = doc.value("liu", json::object());
    check_keys(liu, {"het_threshold", "futility_threshold", "simon", "simon_alpha", "simon_beta"},
               "liu");
    sc.liu_het_threshold = get_number(liu, "het_threshold", 0.2, "liu");
    sc.liu_futility_threshold = get_number(liu, "futility_threshold", 0.5, "liu");
    const double simon_alpha = get_number(liu, "simon_alpha", 0.10, "liu");
    const double simon_beta = get_number(liu, "simon_beta", 0.20, "liu");
    bool needs_simon = false;
    for (const auto& mc : sc.methods) {
        if (mc.spec.method == Method::liu_bhmm) needs_simon = true;
    }
    if (liu.contains("simon") && liu["simon"].is_object()) {
        const json& s = liu["simon"];
        check_keys(s, {"r1", "n1", "r", "n"}, "liu.simon");
        SimonDesign sd;
        sd.r1 = get_int(s, "r1", 0, "liu.simon");
        sd.n1 = get_int(s, "n1", 0, "liu.simon");
        sd.r = get_int(s, "r", 0, "liu.simon");
        sd.n = get_int(s, "n", 0, "liu.simon");
        if (!(0 <= sd.r1 && sd.r1 <= sd.n1 && sd.n1 <= sd.n && sd.r1 <= sd.r && sd.r <= sd.n)) {
            fail("liu.simon", "thresholds violate 0 <= r1 <= n1 <= n, r1 <= r <= n");
        }
        sc.simon = sd;
    } else if (needs_simon) {
        double q0_mean = 0.0, q1_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q0_mean += sc.q0[i];
            q1_mean += sc.q1[i];
        }
        sc.simon = simon_minimax(q0_mean / static_cast<double>(n),
                                 q1_mean / static_cast<double>(n), simon_alpha, simon_beta);
    }

    const json calibration = doc.value("calibration", json::object());
    check_keys(calibration, {"target_alpha", "replicates", "metric"}, "calibration");
    rc.cutoff.target_alpha = get_number(calibration, "target_alpha", 0.10, "calibration");
    rc.cutoff.replicates = get_int(calibration, "replicates", 2000, "calibration");
    const std::string metric = get_string(calibration, "metric", "average", "calibration");
    if (metric != "max" && metric != "average") fail("calibration.metric", "max or average");
    rc.cutoff.max_over_indications = metric == "max";

    const json phi = doc.value("phi_calibration", json::object());
    check_keys(phi,
               {"sims_per_pair", "alpha", "corr_lb", "corr_ub", "measure", "correlation",
                "shape"},
               "phi_calibration");
    rc.phi.sims_per_pair = get_int(phi, "sims_per_pair", 5000, "phi_calibration");
    rc.phi.alpha_q = get_number(phi, "alpha", 0.05, "phi_calibration");
    rc.phi.corr_lb = get_number(phi, "corr_lb", 0.3, "phi_calibration");
    rc.phi.corr_ub = get_number(phi, "corr_ub", 0.5, "phi_calibration");
    rc.phi.measure = parse_measure(get_string(phi, "measure", "b", "phi_calibration"),
                                   "phi_calibration.measure");
    rc.phi.corr = parse_correlation(
        get_string(phi, "correlation", "exponential", "phi_calibration"),
        "phi_calibration.correlation");
    if (phi.contains("shape")) {
        rc.phi.shape_override = get_number(phi, "shape", 1.0, "phi_calibration");
    }
    rc.phi.n = sc.n;
    rc.phi.q0 = sc.q0;
    rc.phi.q1 = sc.q1;

    const json output = doc.value("output", json::object());
    check_keys(output, {"dir", "prefix", "per_replicate"}, "output");
    rc.output.dir = get_string(output, "dir", ".", "output");
    rc.output.prefix = get_string(output, "prefix", "run", "output");
    rc.output.per_replicate = get_bool(output, "per_replicate", false, "output");
    sc.collect_replicates = rc.output.per_replicate;

    // Echo of the fully resolved configuration; parsing it again reproduces
    // this config exactly.
    json echo;
    echo["scenario"] = {{"indications", n_ind}, {"truth", sc.truth},   {"q0", sc.q0},
                        {"q1", sc.q1},          {"replicates", sc.replicates},
                        {"seed", sc.seed},      {"threads", sc.threads}};
    json design_echo{{"n1", sc.n1}, {"n", sc.n}, {"interim_cutoff", sc.interim_cutoff}};
    json cutoffs = json::object();
    for (const auto& mc : sc.methods) {
        if (mc.final_cutoff) cutoffs[mc.label] = *mc.final_cutoff;
    }
    if (!cutoffs.empty()) design_echo["final_cutoff"] = cutoffs;
    echo["design"] = design_echo;
    echo["mcmc"] = {{"burn_in", sc.mcmc.burn_in},
                    {"keep", sc.mcmc.keep},
                    {"adapt_window", sc.mcmc.adapt_window}};
    json methods_echo = json::array();
    for (const auto& mc : sc.methods) methods_echo.push_back(method_json(mc));
    echo["methods"] = methods_echo;
    json liu_echo{{"het_threshold", sc.liu_het_threshold},
                  {"futility_threshold", sc.liu_futility_threshold},
                  {"simon_alpha", simon_alpha},
                  {"simon_beta", simon_beta}};
    if (sc.simon) {
        liu_echo["simon"] = {
            {"r1", sc.simon->r1}, {"n1", sc.simon->n1}, {"r", sc.simon->r}, {"n", sc.simon->n}};
    }
    echo["liu"] = liu_echo;
    echo["calibration"] = {{"target_alpha", rc.cutoff.target_alpha},
                           {"replicates", rc.cutoff.replicates},
                           {"metric", metric}};
    json phi_echo{{"sims_per_pair", rc.phi.sims_per_pair},
                  {"alpha", rc.phi.alpha_q},
                  {"corr_lb", rc.phi.corr_lb},
                  {"corr_ub", rc.phi.corr_ub},
                  {"measure", measure_name(rc.phi.measure)},
                  {"correlation", correlation_name(rc.phi.corr)}};
    if (rc.phi.shape_override) phi_echo["shape"] = *rc.phi.shape_override;
    echo["phi_calibration"] = phi_echo;
    echo["output"] = {{"dir", rc.output.dir},
                      {"prefix", rc.output.prefix},
                      {"per_replicate", rc.output.per_replicate}};
    rc.effective = echo;
    return rc;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config_json(doc);
}

}  // namespace basket
