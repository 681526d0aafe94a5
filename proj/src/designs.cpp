#include "basket/designs.hpp"

#include <cmath>
#include <stdexcept>

#include "basket/errors.hpp"
#include "basket/special.hpp"
#include "basket/stats.hpp"

namespace basket {

TwoStageDesign make_two_stage_design(std::size_t n_ind, int n1, int n, double qf, double q,
                                     double q0, double q1) {
    if (n1 <= 0 || n1 > n) throw std::invalid_argument("design: need 0 < n1 <= n");
    TwoStageDesign d;
    d.n1.assign(n_ind, n1);
    d.n.assign(n_ind, n);
    d.interim_cutoff = qf;
    d.final_cutoff = q;
    d.q0.assign(n_ind, q0);
    d.q1.assign(n_ind, q1);
    return d;
}

namespace {

// Full-horizon patient outcomes per indication, drawn up front so every
// method sees the same data stream within a replicate.
std::vector<std::vector<int>> draw_outcomes(const std::vector<double>& truth,
                                            const std::vector<int>& n, RngStream& rng) {
    std::vector<std::vector<int>> y(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!(truth[i] > 0.0 && truth[i] < 1.0)) {
            throw std::invalid_argument("trial: truth rates must lie in (0,1)");
        }
        y[i].resize(n[i]);
        for (int j = 0; j < n[i]; ++j) y[i][j] = rng.bernoulli(truth[i]) ? 1 : 0;
    }
    return y;
}

int count_responders(const std::vector<int>& y, int upto) {
    int s = 0;
    for (int j = 0; j < upto; ++j) s += y[j];
    return s;
}

struct FitSummary {
    std::vector<double> mean;
    std::vector<double> exceed;  // Pr(p_i > threshold_i)
};

// Posterior means and exceedance probabilities for a subset fit. Independent
// analysis is evaluated analytically instead of by sampling.
FitSummary summarize_fit(const ModelSpec& method, const std::vector<IndicationData>& data,
                         const std::vector<double>& q0, const std::vector<double>& q1,
                         const std::vector<double>& thresholds, const McmcConfig& mcmc,
                         RngStream& rng) {
    FitSummary out;
    const std::size_t k = data.size();
    out.mean.resize(k);
    out.exceed.resize(k);
    if (method.method == Method::independent) {
        for (std::size_t i = 0; i < k; ++i) {
            const BetaParams post = indication_posterior(data[i]);
            out.mean[i] = beta_mean(post);
            out.exceed[i] = beta_tail_prob(post, thresholds[i]);
        }
        return out;
    }
    const PosteriorSamples samples = fit_model(method, data, q0, q1, mcmc, rng);
    for (std::size_t i = 0; i < k; ++i) {
        out.mean[i] = samples.mean(i);
        out.exceed[i] = posterior_prob_exceeds(samples, i, thresholds[i]);
    }
    return out;
}

}  // namespace

TrialResult run_two_stage_trial(const std::vector<double>& truth, const ModelSpec& method,
                                const TwoStageDesign& design, const McmcConfig& mcmc,
                                ReplicateStreams& streams) {
    const std::size_t n_ind = truth.size();
    if (design.indications() != n_ind) {
        throw std::invalid_argument("run_two_stage_trial: design size mismatch");
    }
    const auto outcomes = draw_outcomes(truth, design.n, streams.data);

    // Stage one: fit on every indication, stop the cold ones.
    std::vector<IndicationData> stage1(n_ind);
    std::vector<double> midpoints(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) {
        stage1[i] = IndicationData{static_cast<double>(design.n1[i]),
                                   static_cast<double>(count_responders(outcomes[i], design.n1[i]))};
        midpoints[i] = 0.5 * (design.q0[i] + design.q1[i]);
    }
    const FitSummary interim =
        summarize_fit(method, stage1, design.q0, design.q1, midpoints, mcmc, streams.analysis);

    TrialResult result;
    result.indication.resize(n_ind);
    std::vector<std::size_t> continuing;
    for (std::size_t i = 0; i < n_ind; ++i) {
        auto& o = result.indication[i];
        if (interim.exceed[i] < design.interim_cutoff) {
            o.stopped_early = true;
            o.enrolled = design.n1[i];
            o.responders = static_cast<int>(stage1[i].r);
            o.estimate = interim.mean[i];
            o.exceed_prob = interim.exceed[i];
        } else {
            continuing.push_back(i);
        }
    }
    if (continuing.empty()) return result;

    // Stage two: refit on the continuing indications only.
    std::vector<IndicationData> final_data(continuing.size());
    std::vector<double> q0s(continuing.size()), q1s(continuing.size()),
        thresholds(continuing.size());
    for (std::size_t k = 0; k < continuing.size(); ++k) {
        const std::size_t i = continuing[k];
        final_data[k] = IndicationData{static_cast<double>(design.n[i]),
                                       static_cast<double>(count_responders(outcomes[i], design.n[i]))};
        q0s[k] = design.q0[i];
        q1s[k] = design.q1[i];
        thresholds[k] = design.q0[i];
    }
    const FitSummary fin =
        summarize_fit(method, final_data, q0s, q1s, thresholds, mcmc, streams.analysis);
    for (std::size_t k = 0; k < continuing.size(); ++k) {
        const std::size_t i = continuing[k];
        auto& o = result.indication[i];
        o.enrolled = design.n[i];
        o.responders = static_cast<int>(final_data[k].r);
        o.estimate = fin.mean[k];
        o.exceed_prob = fin.exceed[k];
        o.rejected = fin.exceed[k] > design.final_cutoff;
    }
    return result;
}

std::pair<double, double> cochran_q(const std::vector<IndicationData>& data) {
    if (data.size() < 2) throw std::invalid_argument("cochran_q: need at least two indications");
    double total_n = 0.0, total_r = 0.0;
    for (const auto& d : data) {
        total_n += d.n;
        total_r += d.r;
    }
    if (!(total_n > 0.0)) throw std::invalid_argument("cochran_q: no data");
    const double pooled = total_r / total_n;
    if (pooled <= 0.0 || pooled >= 1.0) return {0.0, 1.0};
    double stat = 0.0;
    for (const auto& d : data) {
        const double dev = d.r - d.n * pooled;
        stat += dev * dev / (d.n * pooled * (1.0 - pooled));
    }
    return {stat, chi2_sf(stat, static_cast<int>(data.size()) - 1)};
}

namespace {

std::vector<double> binom_pmf_table(int n, double p) {
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = binom_pmf(k, n, p);
    return t;
}

// Exact P(reject) for the rule: continue iff X1 > r1, reject iff X1 + X2 > r.
double two_stage_reject(const std::vector<double>& pmf1, int r1, int r, int n2, double p) {
    const int n1 = static_cast<int>(pmf1.size()) - 1;
    double sum = 0.0;
    for (int x = r1 + 1; x <= n1; ++x) sum += pmf1[x] * binom_sf(r - x, n2, p);
    return sum;
}

}  // namespace

double simon_reject_prob(const SimonDesign& d, double p) {
    return two_stage_reject(binom_pmf_table(d.n1, p), d.r1, d.r, d.n - d.n1, p);
}

double simon_early_stop_prob(const SimonDesign& d, double p) {
    return 1.0 - binom_sf(d.r1, d.n1, p);
}

SimonDesign simon_minimax(double q0, double q1, double alpha, double beta, int n_cap) {
    if (!(q0 < q1)) throw std::invalid_argument("simon_minimax: need q0 < q1");
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("simon_minimax: alpha, beta must lie in (0,1)");
    }
    for (int n = 2; n <= n_cap; ++n) {
        bool found = false;
        SimonDesign best{};
        for (int n1 = 1; n1 < n; ++n1) {
            const int n2 = n - n1;
            const auto pmf0 = binom_pmf_table(n1, q0);
            const auto pmf1 = binom_pmf_table(n1, q1);
            for (int r1 = 0; r1 <= n1; ++r1) {
                // Even always-reject stage two cannot rescue the power once
                // too many stage-one futility stops occur.
                if (binom_sf(r1, n1, q1) < 1.0 - beta) break;
                for (int r = r1; r <= n; ++r) {
                    const double type1 = two_stage_reject(pmf0, r1, r, n2, q0);
                    if (type1 > alpha) continue;  // raise r until level holds
                    const double power = two_stage_reject(pmf1, r1, r, n2, q1);
                    if (power >= 1.0 - beta) {
                        const double pet0 = 1.0 - binom_sf(r1, n1, q0);
                        const double en0 = n1 + (1.0 - pet0) * n2;
                        if (!found || en0 < best.expected_n_null) {
                            best = SimonDesign{r1, n1, r, n, type1, power, en0, pet0};
                            found = true;
                        }
                    }
                    break;  // larger r only loses power
                }
            }
        }
        if (found) return best;
    }
    throw InfeasibleDesign("simon_minimax: no design within the sample-size cap");
}

double predictive_power(int n1, int r1, int n2, int n, double q0, int draws, RngStream* rng) {
    if (n != n1 + n2) throw std::invalid_argument("predictive_power: need n = n1 + n2");
    if (r1 < 0 || r1 > n1) throw std::invalid_argument("predictive_power: need 0 <= r1 <= n1");
    const double a = r1 + 0.5;
    const double b = n1 - r1 + 0.5;
    if (draws > 0) {
        if (rng == nullptr) throw std::invalid_argument("predictive_power: rng required");
        int hits = 0;
        for (int s = 0; s < draws; ++s) {
            const double p = rng->beta(a, b);
            const int r2 = rng->binomial(n2, p);
            if (static_cast<double>(r1 + r2) / n > q0) ++hits;
        }
        return static_cast<double>(hits) / draws;
    }
    // Exact: sum the beta-binomial predictive mass of stage-two responders.
    const double log_norm = log_beta_fn(a, b);
    double total = 0.0;
    for (int r2 = 0; r2 <= n2; ++r2) {
        if (static_cast<double>(r1 + r2) / n <= q0) continue;
        total += std::exp(log_binom_coef(n2, r2) + log_beta_fn(a + r2, b + n2 - r2) - log_norm);
    }
    return total;
}

TrialResult run_liu_trial(const std::vector<double>& truth, const LiuDesign& design,
                          const LiuBhmmParams& params, const McmcConfig& mcmc,
                          ReplicateStreams& streams) {
    const TwoStageDesign& base = design.base;
    const std::size_t n_ind = truth.size();
    if (base.indications() != n_ind) {
        throw std::invalid_argument("run_liu_trial: design size mismatch");
    }
    const auto outcomes = draw_outcomes(truth, base.n, streams.data);

    std::vector<IndicationData> stage1(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) {
        stage1[i] = IndicationData{static_cast<double>(base.n1[i]),
                                   static_cast<double>(count_responders(outcomes[i], base.n1[i]))};
    }

    TrialResult result;
    result.indication.resize(n_ind);

    const auto [stat, p_value] = cochran_q(stage1);
    (void)stat;
    if (p_value < design.het_threshold) {
        // Heterogeneity path: pure counting rules, no posterior computation.
        result.path = LiuPath::heterogeneous;
        for (std::size_t i = 0; i < n_ind; ++i) {
            auto& o = result.indication[i];
            const int r1 = static_cast<int>(stage1[i].r);
            if (r1 > design.simon.r1) {
                o.enrolled = base.n[i];
                o.responders = count_responders(outcomes[i], base.n[i]);
                o.rejected = o.responders > design.simon.r;
            } else {
                o.enrolled = base.n1[i];
                o.responders = r1;
                o.stopped_early = true;
            }
            o.estimate = static_cast<double>(o.responders) / o.enrolled;
        }
        return result;
    }

    // Homogeneous path: futility by exact predictive power, then one mixture
    // fit over every indication (early stops contribute stage-one data).
    result.path = LiuPath::homogeneous;
    std::vector<IndicationData> final_data(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) {
        auto& o = result.indication[i];
        const int r1 = static_cast<int>(stage1[i].r);
        const int n2 = base.n[i] - base.n1[i];
        const double pp = predictive_power(base.n1[i], r1, n2, base.n[i], base.q0[i], 0);
        if (pp < design.futility_threshold) {
            o.stopped_early = true;
            o.enrolled = base.n1[i];
            o.responders = r1;
            final_data[i] = stage1[i];
        } else {
            o.enrolled = base.n[i];
            o.responders = count_responders(outcomes[i], base.n[i]);
            final_data[i] = IndicationData{static_cast<double>(base.n[i]),
                                           static_cast<double>(o.responders)};
        }
    }
    const PosteriorSamples samples =
        fit_liu_bhmm(final_data, base.q0, base.q1, params, mcmc, streams.analysis);
    for (std::size_t i = 0; i < n_ind; ++i) {
        auto& o = result.indication[i];
        o.estimate = samples.mean(i);
        o.exceed_prob = posterior_prob_exceeds(samples, i, base.q0[i]);
        if (!o.stopped_early) o.rejected = o.exceed_prob > base.final_cutoff;
    }
    return result;
}

}  // namespace basket
