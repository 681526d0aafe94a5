#include "basket/harness.hpp"

#include <cmath>
#include <stdexcept>

#include "basket/csv.hpp"
#include "basket/errors.hpp"
#include "basket/parallel.hpp"

namespace basket {

TwoStageDesign ScenarioConfig::design_for(const MethodConfig& m) const {
    if (!m.final_cutoff) {
        throw ConfigError("method '" + m.label + "' has no calibrated final cutoff Q");
    }
    TwoStageDesign d;
    d.n1 = n1;
    d.n = n;
    d.interim_cutoff = interim_cutoff;
    d.final_cutoff = *m.final_cutoff;
    d.q0 = q0;
    d.q1 = q1;
    return d;
}

LiuDesign ScenarioConfig::liu_design_for(const MethodConfig& m) const {
    if (!simon) {
        throw ConfigError("Liu's design needs Simon thresholds (set liu.simon or run with auto)");
    }
    LiuDesign d;
    d.het_threshold = liu_het_threshold;
    d.futility_threshold = liu_futility_threshold;
    d.base = design_for(m);
    d.simon = *simon;
    return d;
}

namespace {

struct ReplicateOutcome {
    bool failed = false;
    TrialResult trial;
};

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
    const std::size_t n_ind = cfg.indications();
    if (n_ind == 0) throw ConfigError("scenario has no indications");
    if (cfg.q0.size() != n_ind || cfg.q1.size() != n_ind || cfg.n1.size() != n_ind ||
        cfg.n.size() != n_ind) {
        throw ConfigError("scenario vectors must all have one entry per indication");
    }
    if (cfg.methods.empty()) throw ConfigError("scenario lists no methods");
    if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");

    ScenarioReport report;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const MethodConfig& method = cfg.methods[m];
        const bool is_liu = method.spec.method == Method::liu_bhmm;
        const TwoStageDesign design = cfg.design_for(method);
        const LiuDesign liu = is_liu ? cfg.liu_design_for(method) : LiuDesign{};

        std::vector<ReplicateOutcome> outcomes(cfg.replicates);
        parallel_for(static_cast<std::size_t>(cfg.replicates), cfg.threads, [&](std::size_t rep) {
            ReplicateStreams streams = replicate_streams(cfg.seed, rep, m);
            try {
                outcomes[rep].trial =
                    is_liu ? run_liu_trial(cfg.truth, liu, method.spec.liu, cfg.mcmc, streams)
                           : run_two_stage_trial(cfg.truth, method.spec, design, cfg.mcmc,
                                                 streams);
            } catch (const ChainFailure&) {
                outcomes[rep].failed = true;
            }
        });

        // Ground truth classification: an indication is truly sensitive when
        // its rate reaches the target.
        std::vector<bool> sensitive(n_ind);
        for (std::size_t i = 0; i < n_ind; ++i) {
            sensitive[i] = cfg.truth[i] >= cfg.q1[i] - 1e-12;
        }

        OperatingCharacteristics oc;
        oc.label = method.label;
        oc.reject_pct.assign(n_ind, 0.0);
        oc.stop_pct.assign(n_ind, 0.0);
        oc.abs_bias.assign(n_ind, 0.0);
        oc.rmse.assign(n_ind, 0.0);
        std::vector<double> bias_sum(n_ind, 0.0), sq_sum(n_ind, 0.0);
        int used = 0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            const auto& out = outcomes[rep];
            if (out.failed) {
                ++oc.failed_replicates;
                continue;
            }
            ++used;
            int tp = 0, tn = 0;
            bool perfect = true;
            for (std::size_t i = 0; i < n_ind; ++i) {
                const auto& ind = out.trial.indication[i];
                if (ind.rejected) oc.reject_pct[i] += 1.0;
                if (ind.stopped_early) oc.stop_pct[i] += 1.0;
                const double err = ind.estimate - cfg.truth[i];
                bias_sum[i] += err;
                sq_sum[i] += err * err;
                if (ind.rejected == sensitive[i]) {
                    if (sensitive[i]) ++tp;
                    else ++tn;
                } else {
                    perfect = false;
                }
            }
            oc.avg_sample_size += out.trial.total_enrolled();
            oc.mean_tp += tp;
            oc.mean_tn += tn;
            if (perfect) oc.pct_perfect += 1.0;
            if (cfg.collect_replicates) {
                for (std::size_t i = 0; i < n_ind; ++i) {
                    const auto& ind = out.trial.indication[i];
                    report.records.push_back(ReplicateRecord{
                        method.label, rep, static_cast<int>(i + 1), ind.enrolled,
                        ind.responders, ind.stopped_early, ind.rejected, ind.estimate,
                        ind.exceed_prob});
                }
            }
        }
        if (used == 0) throw ChainFailure("run_scenario: every replicate failed");
        const double denom = static_cast<double>(used);
        for (std::size_t i = 0; i < n_ind; ++i) {
            oc.reject_pct[i] *= 100.0 / denom;
            oc.stop_pct[i] *= 100.0 / denom;
            oc.abs_bias[i] = std::fabs(bias_sum[i] / denom);
            oc.rmse[i] = std::sqrt(sq_sum[i] / denom);
        }
        oc.avg_sample_size /= denom;
        oc.pct_perfect *= 100.0 / denom;
        oc.mean_tp /= denom;
        oc.mean_tn /= denom;
        oc.replicates_used = used;
        report.methods.push_back(std::move(oc));
    }
    return report;
}

std::string operating_characteristics_csv(const std::vector<OperatingCharacteristics>& ocs,
                                          const std::vector<double>& truth) {
    const std::size_t n_ind = truth.size();
    std::string out;
    std::vector<std::string> header{"Method", "Metric"};
    for (std::size_t i = 0; i < n_ind; ++i) header.push_back("Type " + std::to_string(i + 1));
    header.insert(header.end(), {"Sample Size", "% Perfect", "# TP", "# TN"});
    out += csv_row(header);

    std::vector<std::string> truth_row{"", "True RRs"};
    for (double t : truth) truth_row.push_back(format_double(t));
    truth_row.insert(truth_row.end(), {"", "", "", ""});
    out += csv_row(truth_row);

    for (const auto& oc : ocs) {
        std::vector<std::string> reject{oc.label, "% reject"};
        std::vector<std::string> stop{oc.label, "% stop"};
        for (std::size_t i = 0; i < n_ind; ++i) {
            reject.push_back(format_double(oc.reject_pct[i], 1));
            stop.push_back(format_double(oc.stop_pct[i], 1));
        }
        reject.insert(reject.end(),
                      {format_double(oc.avg_sample_size, 1), format_double(oc.pct_perfect, 1),
                       format_double(oc.mean_tp, 2), format_double(oc.mean_tn, 2)});
        stop.insert(stop.end(), {"", "", "", ""});
        out += csv_row(reject);
        out += csv_row(stop);
    }
    return out;
}

std::string replicate_records_csv(const std::vector<ReplicateRecord>& records) {
    std::string out = csv_row({"method", "replicate", "indication", "enrolled", "responders",
                               "stopped_early", "rejected", "estimate", "exceed_prob"});
    for (const auto& r : records) {
        out += csv_row({r.method, std::to_string(r.replicate), std::to_string(r.indication),
                        std::to_string(r.enrolled), std::to_string(r.responders),
                        r.stopped_early ? "1" : "0", r.rejected ? "1" : "0",
                        format_double(r.estimate), format_double(r.exceed_prob)});
    }
    return out;
}

std::string estimation_metrics_csv(const std::vector<OperatingCharacteristics>& ocs) {
    std::string out = csv_row({"method", "indication", "abs_bias", "rmse"});
    for (const auto& oc : ocs) {
        for (std::size_t i = 0; i < oc.abs_bias.size(); ++i) {
            out += csv_row({oc.label, std::to_string(i + 1), format_double(oc.abs_bias[i]),
                            format_double(oc.rmse[i])});
        }
    }
    return out;
}

}  // namespace basket
