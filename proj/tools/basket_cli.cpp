// Command-line front end: distance tables, single fits, single trials,
// calibration, and the operating-characteristics simulator.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "basket/calibration.hpp"
#include "basket/config.hpp"
#include "basket/csv.hpp"
#include "basket/designs.hpp"
#include "basket/errors.hpp"
#include "basket/harness.hpp"

using namespace basket;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitChainFailure = 4;
constexpr int kExitNumerical = 5;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        write_file(path, content);
    }
}

std::string output_path(const RunConfig& rc, const std::string& suffix) {
    return (std::filesystem::path(rc.output.dir) / (rc.output.prefix + "_" + suffix)).string();
}

void echo_effective_config(const RunConfig& rc) {
    std::filesystem::create_directories(rc.output.dir);
    write_file(output_path(rc, "effective_config.json"), rc.effective.dump(2) + "\n");
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(std::stod(tok));
    }
    return out;
}

DistanceMeasure measure_from_flag(const std::string& m) {
    if (m == "b") return DistanceMeasure::bhattacharyya;
    if (m == "h") return DistanceMeasure::hellinger;
    if (m == "kl") return DistanceMeasure::symmetrized_kl;
    throw ConfigError("unknown measure '" + m + "' (expected b, h, kl, or all)");
}

// ---- distance ----------------------------------------------------------

int cmd_distance(const std::string& n_csv, const std::string& r_csv, const std::string& measure,
                 const std::string& corr_kind, double phi, bool emit_corr, int sweep_r1,
                 const std::string& out) {
    std::string csv;
    if (sweep_r1 >= 0) {
        // two-indication sweep: r2 runs over 0..n
        const double n = parse_double_list(n_csv).at(0);
        csv += csv_row({"r2", "b", "h", "kl"});
        for (int r2 = 0; r2 <= static_cast<int>(n); ++r2) {
            const IndicationData a{n, static_cast<double>(sweep_r1)};
            const IndicationData b{n, static_cast<double>(r2)};
            csv += csv_row({std::to_string(r2), format_double(b_distance(a, b)),
                            format_double(h_distance(a, b)), format_double(kl_distance(a, b))});
        }
        emit(out, csv);
        return 0;
    }

    const std::vector<double> rs = parse_double_list(r_csv);
    std::vector<double> ns = parse_double_list(n_csv);
    if (ns.size() == 1) ns.assign(rs.size(), ns[0]);
    if (rs.size() < 2 || ns.size() != rs.size()) {
        throw ConfigError("distance: need matching --n and --r lists with at least two entries");
    }
    std::vector<IndicationData> data(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) data[i] = {ns[i], rs[i]};

    std::vector<std::string> measures;
    if (measure == "all") {
        measures = {"b", "h", "kl"};
    } else {
        measures = {measure};
    }
    for (const auto& mname : measures) {
        const Matrix d = distance_matrix(data, measure_from_flag(mname));
        csv += "measure," + mname + "\n";
        for (std::size_t i = 0; i < d.rows; ++i) {
            std::vector<std::string> row;
            for (std::size_t j = 0; j < d.cols; ++j) row.push_back(format_double(d(i, j)));
            csv += csv_row(row);
        }
        if (emit_corr) {
            const CorrelationKind kind = corr_kind == "sqexp"
                                             ? CorrelationKind::squared_exponential
                                             : CorrelationKind::exponential;
            const Matrix r = build_corr_matrix(d, {kind, phi});
            csv += "correlation," + corr_kind + ",phi," + format_double(phi) + "\n";
            for (std::size_t i = 0; i < r.rows; ++i) {
                std::vector<std::string> row;
                for (std::size_t j = 0; j < r.cols; ++j) row.push_back(format_double(r(i, j)));
                csv += csv_row(row);
            }
        }
    }
    emit(out, csv);
    return 0;
}

// ---- fit ----------------------------------------------------------------

std::vector<IndicationData> read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path + "'");
    std::vector<IndicationData> data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string ind, n, r;
        if (!std::getline(ss, ind, ',') || !std::getline(ss, n, ',') || !std::getline(ss, r)) {
            throw ConfigError("dataset: expected 'indication,n,r' rows");
        }
        try {
            data.push_back({std::stod(n), std::stod(r)});
        } catch (const std::exception&) {
            if (data.empty()) continue;  // header line
            throw ConfigError("dataset: non-numeric row '" + line + "'");
        }
    }
    if (data.empty()) throw ConfigError("dataset: no rows in '" + path + "'");
    return data;
}

int cmd_fit(const std::string& data_path, const std::string& method,
            const std::string& config_path, const std::string& out) {
    RunConfig rc = config_path.empty() ? parse_config_json(json::object())
                                       : parse_config(config_path);
    const std::vector<IndicationData> data = read_dataset(data_path);
    const std::size_t n_ind = data.size();

    // rate vectors resized to the dataset if the config used defaults
    std::vector<double> q0 = rc.scenario.q0, q1 = rc.scenario.q1;
    if (q0.size() != n_ind) q0.assign(n_ind, q0.at(0));
    if (q1.size() != n_ind) q1.assign(n_ind, q1.at(0));

    const MethodConfig* chosen = nullptr;
    for (const auto& mc : rc.scenario.methods) {
        if (mc.label == method || method_name(mc.spec.method) == method) chosen = &mc;
    }
    MethodConfig fallback;
    if (chosen == nullptr) {
        fallback.label = method;
        fallback.spec.method = method_from_name(method);
        chosen = &fallback;
    }
    RngStream rng(rc.scenario.seed, make_stream_id(0, 0, StreamPurpose::analysis));
    const PosteriorSamples ps = fit_model(chosen->spec, data, q0, q1, rc.scenario.mcmc, rng);

    std::string csv = csv_row({"indication", "n", "r", "mean", "sd", "pr_exceed_q0", "rhat"});
    for (std::size_t i = 0; i < n_ind; ++i) {
        csv += csv_row({std::to_string(i + 1), format_double(data[i].n),
                        format_double(data[i].r), format_double(ps.mean(i), 6),
                        format_double(ps.sd(i), 6),
                        format_double(posterior_prob_exceeds(ps, i, q0[i]), 6),
                        format_double(ps.rhat[i], 4)});
    }
    emit(out, csv);
    return 0;
}

// ---- trial ---------------------------------------------------------------

int cmd_trial(const std::string& config_path, const std::string& method_label, int replicate,
              const std::string& out) {
    const RunConfig rc = parse_config(config_path);
    echo_effective_config(rc);
    const ScenarioConfig& sc = rc.scenario;

    const MethodConfig* chosen = &sc.methods.front();
    std::size_t method_index = 0;
    if (!method_label.empty()) {
        bool found = false;
        for (std::size_t m = 0; m < sc.methods.size(); ++m) {
            if (sc.methods[m].label == method_label) {
                chosen = &sc.methods[m];
                method_index = m;
                found = true;
            }
        }
        if (!found) throw ConfigError("no method labelled '" + method_label + "'");
    }
    ReplicateStreams streams = replicate_streams(sc.seed, replicate, method_index);
    const TrialResult res =
        chosen->spec.method == Method::liu_bhmm
            ? run_liu_trial(sc.truth, sc.liu_design_for(*chosen), chosen->spec.liu, sc.mcmc,
                            streams)
            : run_two_stage_trial(sc.truth, chosen->spec, sc.design_for(*chosen), sc.mcmc,
                                  streams);

    std::string csv = csv_row({"indication", "truth", "enrolled", "responders", "stopped_early",
                               "rejected", "estimate", "exceed_prob"});
    for (std::size_t i = 0; i < res.indication.size(); ++i) {
        const auto& o = res.indication[i];
        csv += csv_row({std::to_string(i + 1), format_double(sc.truth[i]),
                        std::to_string(o.enrolled), std::to_string(o.responders),
                        o.stopped_early ? "1" : "0", o.rejected ? "1" : "0",
                        format_double(o.estimate, 6), format_double(o.exceed_prob, 6)});
    }
    if (chosen->spec.method == Method::liu_bhmm) {
        csv += "path," +
               std::string(res.path == LiuPath::heterogeneous ? "heterogeneous"
                                                              : "homogeneous") +
               "\n";
    }
    emit(out, csv);
    return 0;
}

// ---- calibrate-phi --------------------------------------------------------

int cmd_calibrate_phi(const std::string& config_path, const std::string& measure,
                      const std::string& corr, int sims, const std::string& out) {
    RunConfig rc = config_path.empty() ? parse_config_json(json::object())
                                       : parse_config(config_path);
    PhiPriorCalib calib = rc.phi;
    if (!measure.empty()) calib.measure = measure_from_flag(measure);
    if (!corr.empty()) {
        calib.corr = corr == "sqexp" ? CorrelationKind::squared_exponential
                                     : CorrelationKind::exponential;
    }
    if (sims > 0) calib.sims_per_pair = sims;
    RngStream rng(rc.scenario.seed, make_stream_id(0, 0, StreamPurpose::distance_calibration));
    const PhiPriorResult res = calibrate_phi_prior(calib, rng);

    const json doc{{"d_t", res.d_t},
                   {"min_nonzero", res.min_nonzero},
                   {"a_lb", res.a_lb},
                   {"a_ub", res.a_ub},
                   {"a", res.a}};
    std::cout << "d_t = " << format_double(res.d_t, 4) << "\n"
              << "a interval = [" << format_double(res.a_lb, 4) << ", "
              << format_double(res.a_ub, 4) << "]\n"
              << "a = " << format_double(res.a, 4) << "\n";
    if (!out.empty()) write_file(out, doc.dump(2) + "\n");
    return 0;
}

// ---- calibrate-q -----------------------------------------------------------

int cmd_calibrate_q(const std::string& config_path, const std::string& out) {
    const RunConfig rc = parse_config(config_path);
    echo_effective_config(rc);
    const ScenarioConfig& sc = rc.scenario;
    json cutoffs = json::object();
    for (std::size_t m = 0; m < sc.methods.size(); ++m) {
        const MethodConfig& mc = sc.methods[m];
        // calibration runs under the global null with a placeholder cutoff
        MethodConfig probe = mc;
        probe.final_cutoff = 0.5;
        const TwoStageDesign design = sc.design_for(probe);
        std::optional<LiuDesign> liu;
        if (mc.spec.method == Method::liu_bhmm) liu = sc.liu_design_for(probe);
        const CutoffResult r = calibrate_final_cutoff(mc.spec, design, rc.cutoff, sc.mcmc,
                                                      sc.seed, m, sc.threads, liu);
        cutoffs[mc.label] = r.q;
        std::cout << mc.label << ": Q = " << format_double(r.q, 4) << " (max null reject "
                  << format_double(100.0 * *std::max_element(r.reject_rate.begin(),
                                                             r.reject_rate.end()),
                                   1)
                  << "%, failed replicates " << r.failed_replicates << ")\n";
    }
    const std::string path = out.empty() ? output_path(rc, "cutoffs.json") : out;
    write_file(path, cutoffs.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
    return 0;
}

// ---- simulate / compare -----------------------------------------------------

int run_and_write(const RunConfig& rc) {
    echo_effective_config(rc);
    const ScenarioReport report = run_scenario(rc.scenario);
    const std::string oc_csv = operating_characteristics_csv(report.methods, rc.scenario.truth);
    write_file(output_path(rc, "oc.csv"), oc_csv);
    write_file(output_path(rc, "metrics.csv"), estimation_metrics_csv(report.methods));
    if (rc.output.per_replicate) {
        write_file(output_path(rc, "replicates.csv"), replicate_records_csv(report.records));
    }
    std::cout << oc_csv;
    for (const auto& oc : report.methods) {
        if (oc.failed_replicates > 0) {
            std::cerr << oc.label << ": " << oc.failed_replicates
                      << " failed replicates excluded\n";
        }
    }
    return 0;
}

void apply_overrides(RunConfig& rc, std::uint64_t seed, int replicates, int threads, bool full) {
    if (seed != 0) {
        rc.scenario.seed = seed;
        rc.effective["scenario"]["seed"] = seed;
    }
    if (replicates > 0) {
        rc.scenario.replicates = replicates;
        rc.effective["scenario"]["replicates"] = replicates;
    }
    if (full) {
        rc.scenario.replicates = 5000;
        rc.effective["scenario"]["replicates"] = 5000;
    }
    if (threads > 0) {
        rc.scenario.threads = threads;
        rc.effective["scenario"]["threads"] = threads;
    }
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, int replicates, int threads,
                 bool full) {
    RunConfig rc = parse_config(config_path);
    apply_overrides(rc, seed, replicates, threads, full);
    return run_and_write(rc);
}

int cmd_compare(const std::vector<std::string>& config_paths, std::uint64_t seed, int replicates,
                int threads, bool full) {
    if (config_paths.empty()) throw ConfigError("compare: at least one --config required");
    RunConfig merged = parse_config(config_paths.front());
    for (std::size_t i = 1; i < config_paths.size(); ++i) {
        RunConfig other = parse_config(config_paths[i]);
        // scenario definitions must agree exactly; only methods may differ
        for (const char* key : {"scenario", "design", "mcmc", "liu"}) {
            json a = merged.effective[key];
            json b = other.effective[key];
            a.erase("final_cutoff");
            b.erase("final_cutoff");
            if (a != b) {
                throw ConfigError(std::string("compare: mismatched '") + key +
                                  "' blocks between configs");
            }
        }
        for (auto& mc : other.scenario.methods) {
            for (const auto& existing : merged.scenario.methods) {
                if (existing.label == mc.label) {
                    throw ConfigError("compare: duplicate method label '" + mc.label + "'");
                }
            }
            merged.scenario.methods.push_back(mc);
        }
        for (const auto& mj : other.effective["methods"]) {
            merged.effective["methods"].push_back(mj);
        }
    }
    apply_overrides(merged, seed, replicates, threads, full);
    return run_and_write(merged);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian basket-trial analysis and simulation"};
    app.require_subcommand(1);

    std::string d_n = "24", d_r, d_measure = "all", d_corr = "exp", d_out;
    double d_phi = 1.0;
    bool d_emit_corr = false;
    int d_sweep = -1;
    auto* distance_cmd = app.add_subcommand("distance", "pairwise distance table (CSV)");
    distance_cmd->add_option("--n", d_n, "sample size (scalar or list)");
    distance_cmd->add_option("--r", d_r, "responder counts, comma separated");
    distance_cmd->add_option("--measure", d_measure, "b, h, kl, or all");
    distance_cmd->add_option("--corr", d_corr, "exp or sqexp (with --emit-corr)");
    distance_cmd->add_option("--phi", d_phi, "correlation range parameter");
    distance_cmd->add_flag("--emit-corr", d_emit_corr, "also print the correlation matrix");
    distance_cmd->add_option("--sweep", d_sweep, "fix r1 and sweep r2 over 0..n");
    distance_cmd->add_option("--out", d_out, "output file (default stdout)");

    std::string f_data, f_method = "cbhm", f_config, f_out;
    auto* fit_cmd = app.add_subcommand("fit", "posterior summaries for a dataset (CSV)");
    fit_cmd->add_option("--data", f_data, "dataset CSV: indication,n,r")->required();
    fit_cmd->add_option("--method", f_method, "model name or config label");
    fit_cmd->add_option("--config", f_config, "JSON config (optional)");
    fit_cmd->add_option("--out", f_out, "output file (default stdout)");

    std::string t_config, t_method, t_out;
    int t_replicate = 0;
    auto* trial_cmd = app.add_subcommand("trial", "simulate one trial replicate");
    trial_cmd->add_option("--config", t_config, "JSON config")->required();
    trial_cmd->add_option("--method", t_method, "method label (default: first)");
    trial_cmd->add_option("--replicate", t_replicate, "replicate index");
    trial_cmd->add_option("--out", t_out, "output file (default stdout)");

    std::string cp_config, cp_measure, cp_corr, cp_out;
    int cp_sims = 0;
    auto* cphi_cmd = app.add_subcommand("calibrate-phi", "distance-quantile prior calibration");
    cphi_cmd->add_option("--config", cp_config, "JSON config (optional)");
    cphi_cmd->add_option("--measure", cp_measure, "b, h, or kl");
    cphi_cmd->add_option("--corr", cp_corr, "exp or sqexp");
    cphi_cmd->add_option("--m", cp_sims, "simulations per pair and scenario");
    cphi_cmd->add_option("--out", cp_out, "JSON output file");

    std::string cq_config, cq_out;
    auto* cq_cmd = app.add_subcommand("calibrate-q", "final-cutoff calibration per method");
    cq_cmd->add_option("--config", cq_config, "JSON config")->required();
    cq_cmd->add_option("--out", cq_out, "cutoffs JSON file");

    std::string s_config;
    std::uint64_t s_seed = 0;
    int s_replicates = 0, s_threads = 0;
    bool s_full = false;
    auto* sim_cmd = app.add_subcommand("simulate", "operating-characteristics simulation");
    sim_cmd->add_option("--config", s_config, "JSON config")->required();
    sim_cmd->add_option("--seed", s_seed, "override scenario seed");
    sim_cmd->add_option("--replicates", s_replicates, "override replicate count");
    sim_cmd->add_option("--threads", s_threads, "override worker threads");
    sim_cmd->add_flag("--full", s_full, "run the paper-scale 5000 replicates");

    std::vector<std::string> c_configs;
    std::uint64_t c_seed = 0;
    int c_replicates = 0, c_threads = 0;
    bool c_full = false;
    auto* cmp_cmd = app.add_subcommand("compare", "side-by-side methods on one scenario");
    cmp_cmd->add_option("--config", c_configs, "JSON config(s) sharing the scenario")->required();
    cmp_cmd->add_option("--seed", c_seed, "override scenario seed");
    cmp_cmd->add_option("--replicates", c_replicates, "override replicate count");
    cmp_cmd->add_option("--threads", c_threads, "override worker threads");
    cmp_cmd->add_flag("--full", c_full, "run the paper-scale 5000 replicates");

    CLI11_PARSE(app, argc, argv);

    try {
        if (distance_cmd->parsed()) {
            return cmd_distance(d_n, d_r, d_measure, d_corr, d_phi, d_emit_corr, d_sweep, d_out);
        }
        if (fit_cmd->parsed()) return cmd_fit(f_data, f_method, f_config, f_out);
        if (trial_cmd->parsed()) return cmd_trial(t_config, t_method, t_replicate, t_out);
        if (cphi_cmd->parsed()) {
            return cmd_calibrate_phi(cp_config, cp_measure, cp_corr, cp_sims, cp_out);
        }
        if (cq_cmd->parsed()) return cmd_calibrate_q(cq_config, cq_out);
        if (sim_cmd->parsed()) {
            return cmd_simulate(s_config, s_seed, s_replicates, s_threads, s_full);
        }
        if (cmp_cmd->parsed()) {
            return cmd_compare(c_configs, c_seed, c_replicates, c_threads, c_full);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCalibration;
    } catch (const ChainFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitChainFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
