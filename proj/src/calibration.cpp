#include "basket/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "basket/errors.hpp"
#include "basket/parallel.hpp"
#include "basket/stats.hpp"

namespace basket {

double phi_for_correlation(CorrelationKind kind, double rho, double d_t) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("phi_for_correlation: rho in (0,1)");
    if (!(d_t > 0.0)) throw std::domain_error("phi_for_correlation: d_t must be positive");
    switch (kind) {
        case CorrelationKind::exponential: return -std::log(rho) / d_t;
        case CorrelationKind::squared_exponential: return -std::log(rho) / (d_t * d_t);
    }
    throw std::invalid_argument("phi_for_correlation: unknown kind");
}

PhiPriorResult calibrate_phi_prior(const PhiPriorCalib& calib, RngStream& rng) {
    const std::size_t n_ind = calib.n.size();
    if (n_ind < 2) throw std::invalid_argument("calibrate_phi_prior: need at least two indications");
    if (calib.q0.size() != n_ind || calib.q1.size() != n_ind) {
        throw std::invalid_argument("calibrate_phi_prior: rate vector size mismatch");
    }
    if (!(calib.corr_lb > 0.0 && calib.corr_lb < calib.corr_ub && calib.corr_ub < 1.0)) {
        if (calib.corr_lb != calib.corr_ub) {
            throw std::invalid_argument("calibrate_phi_prior: need 0 < rho_lb <= rho_ub < 1");
        }
    }
    if (calib.sims_per_pair < 1) throw std::invalid_argument("calibrate_phi_prior: M >= 1");

    std::vector<double> pooled;
    pooled.reserve(n_ind * (n_ind - 1) * calib.sims_per_pair);
    for (std::size_t i = 0; i < n_ind; ++i) {
        for (std::size_t j = i + 1; j < n_ind; ++j) {
            for (int scenario = 0; scenario < 2; ++scenario) {
                const double pi = scenario == 0 ? calib.q0[i] : calib.q1[i];
                const double pj = scenario == 0 ? calib.q0[j] : calib.q1[j];
                for (int m = 0; m < calib.sims_per_pair; ++m) {
                    const IndicationData di{static_cast<double>(calib.n[i]),
                                            static_cast<double>(rng.binomial(calib.n[i], pi))};
                    const IndicationData dj{static_cast<double>(calib.n[j]),
                                            static_cast<double>(rng.binomial(calib.n[j], pj))};
                    pooled.push_back(distance(calib.measure, di, dj));
                }
            }
        }
    }

    PhiPriorResult out;
    out.min_nonzero = 0.0;
    bool any_nonzero = false;
    for (double d : pooled) {
        if (d > 0.0 && (!any_nonzero || d < out.min_nonzero)) {
            out.min_nonzero = d;
            any_nonzero = true;
        }
    }
    if (!any_nonzero) {
        throw CalibrationError("calibrate_phi_prior: all simulated distances are zero");
    }
    out.d_t = quantile_type7(pooled, 1.0 - calib.alpha_q);
    if (!(out.d_t > 0.0)) {
        throw CalibrationError("calibrate_phi_prior: distance quantile degenerate at zero");
    }
    out.a_lb = phi_for_correlation(calib.corr, calib.corr_ub, out.d_t);
    out.a_ub = phi_for_correlation(calib.corr, calib.corr_lb, out.d_t);
    out.a = calib.shape_override
                ? *calib.shape_override
                : (out.a_lb == out.a_ub ? out.a_lb : rng.uniform(out.a_lb, out.a_ub));
    return out;
}

CutoffResult cutoff_from_replicates(const std::vector<NullReplicate>& replicates,
                                    double target_alpha, bool max_over_indications) {
    if (!(target_alpha > 0.0 && target_alpha <= 1.0)) {
        throw std::invalid_argument("cutoff_from_replicates: alpha in (0,1]");
    }
    std::size_t n_ind = 0;
    std::size_t successes = 0;
    for (const auto& rep : replicates) {
        if (rep.failed) continue;
        ++successes;
        n_ind = rep.stopped.size();
    }
    if (successes == 0) throw CalibrationError("cutoff_from_replicates: no usable replicates");

    // Per-indication exceedance values of replicates that reached the final
    // test; stopped indications can never reject, so they only enter the
    // denominator.
    std::vector<std::vector<double>> values(n_ind);
    for (const auto& rep : replicates) {
        if (rep.failed) continue;
        for (std::size_t i = 0; i < n_ind; ++i) {
            if (!rep.stopped[i]) values[i].push_back(rep.exceed[i]);
        }
    }

    // The rejection count #(v > Q) drops below the allowance exactly at the
    // (k+1)-th largest value, so the smallest feasible Q is attained there.
    auto kth_largest = [](std::vector<double> v, std::size_t k) -> double {
        if (k >= v.size()) return 0.0;
        std::nth_element(v.begin(), v.begin() + k, v.end(), std::greater<double>());
        return v[k];
    };

    double q = 0.0;
    if (max_over_indications) {
        const auto allowance =
            static_cast<std::size_t>(target_alpha * static_cast<double>(successes));
        for (std::size_t i = 0; i < n_ind; ++i) {
            q = std::max(q, kth_largest(values[i], allowance));
        }
    } else {
        std::vector<double> all;
        for (const auto& v : values) all.insert(all.end(), v.begin(), v.end());
        const auto allowance = static_cast<std::size_t>(
            target_alpha * static_cast<double>(successes) * static_cast<double>(n_ind));
        q = kth_largest(all, allowance);
    }

    CutoffResult out;
    out.q = q;
    out.reject_rate.assign(n_ind, 0.0);
    for (std::size_t i = 0; i < n_ind; ++i) {
        std::size_t count = 0;
        for (double v : values[i]) {
            if (v > q) ++count;
        }
        out.reject_rate[i] = static_cast<double>(count) / static_cast<double>(successes);
    }
    out.failed_replicates = static_cast<int>(replicates.size() - successes);
    return out;
}

CutoffResult calibrate_final_cutoff(const ModelSpec& method, const TwoStageDesign& design,
                                    const CutoffCalib& calib, const McmcConfig& mcmc,
                                    std::uint64_t seed, std::uint64_t method_index, int threads,
                                    const std::optional<LiuDesign>& liu) {
    if (calib.replicates < 1) throw std::invalid_argument("calibrate_final_cutoff: replicates >= 1");
    const bool is_liu = method.method == Method::liu_bhmm;
    if (is_liu && !liu) {
        throw std::invalid_argument("calibrate_final_cutoff: Liu's method needs its two-path design");
    }
    const std::vector<double> truth = design.q0;  // global null
    std::vector<NullReplicate> cache(calib.replicates);
    parallel_for(static_cast<std::size_t>(calib.replicates), threads, [&](std::size_t rep) {
        ReplicateStreams streams{
            RngStream(seed, make_stream_id(rep, 0, StreamPurpose::calibration_data)),
            RngStream(seed,
                      make_stream_id(rep, method_index, StreamPurpose::calibration_analysis))};
        NullReplicate& slot = cache[rep];
        try {
            const TrialResult trial =
                is_liu ? run_liu_trial(truth, *liu, method.liu, mcmc, streams)
                       : run_two_stage_trial(truth, method, design, mcmc, streams);
            slot.stopped.resize(trial.indication.size());
            slot.exceed.resize(trial.indication.size());
            for (std::size_t i = 0; i < trial.indication.size(); ++i) {
                const auto& o = trial.indication[i];
                slot.stopped[i] = o.stopped_early;
                // Count-based Simon-path decisions carry no exceedance
                // probability; pin them to 0/1 so no Q can flip them.
                slot.exceed[i] =
                    o.exceed_prob > 0.0 ? o.exceed_prob : (o.rejected ? 1.0 : 0.0);
            }
        } catch (const ChainFailure&) {
            slot.failed = true;
        }
    });
    return cutoff_from_replicates(cache, calib.target_alpha, calib.max_over_indications);
}

}  // namespace basket
