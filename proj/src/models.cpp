#include "basket/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "basket/errors.hpp"
#include "basket/special.hpp"
#include "basket/stats.hpp"

namespace basket {

std::string method_name(Method m) {
    switch (m) {
        case Method::independent: return "independent";
        case Method::bhm: return "bhm";
        case Method::exnex: return "exnex";
        case Method::liu_bhmm: return "liu";
        case Method::cbhm: return "cbhm";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "independent") return Method::independent;
    if (name == "bhm") return Method::bhm;
    if (name == "exnex") return Method::exnex;
    if (name == "liu" || name == "liu_bhmm") return Method::liu_bhmm;
    if (name == "cbhm") return Method::cbhm;
    throw ConfigError("unknown method: " + name);
}

double PosteriorSamples::mean(std::size_t i) const {
    const std::size_t s = n_draws();
    double sum = 0.0;
    for (std::size_t k = 0; k < s; ++k) sum += at(k, i);
    return s == 0 ? 0.0 : sum / static_cast<double>(s);
}

double PosteriorSamples::sd(std::size_t i) const {
    const std::size_t s = n_draws();
    if (s < 2) return 0.0;
    const double m = mean(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
        const double d = at(k, i) - m;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(s - 1));
}

double posterior_prob_exceeds(const PosteriorSamples& samples, std::size_t i, double t) {
    if (i >= samples.n_indications) throw std::out_of_range("posterior_prob_exceeds: bad index");
    const std::size_t s = samples.n_draws();
    std::size_t count = 0;
    for (std::size_t k = 0; k < s; ++k) {
        if (samples.at(k, i) > t) ++count;
    }
    return s == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(s);
}

namespace {

// log(1 + e^x) without overflow.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Binomial log likelihood of one indication on the logit scale.
inline double binom_loglik(double theta, double n, double r) {
    return r * theta - n * softplus(theta);
}

inline double empirical_logit(const IndicationData& d) {
    return std::log((d.r + 0.5) / (d.n - d.r + 0.5));
}

std::vector<double> logits_of(const std::vector<double>& q) {
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = logit(q[i]);
    return out;
}

double mean_logit(const std::vector<double>& q) {
    double s = 0.0;
    for (double v : q) s += logit(v);
    return s / static_cast<double>(q.size());
}

double scalar_prior_logpdf(const ScalarPrior& prior, double v) {
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    switch (prior.kind) {
        case ScalarPrior::Kind::inverse_gamma:
            return -(prior.a + 1.0) * std::log(v) - prior.b / v;
        case ScalarPrior::Kind::gamma:
            return (prior.a - 1.0) * std::log(v) - prior.b * v;
        case ScalarPrior::Kind::uniform:
            return (v >= prior.a && v <= prior.b) ? 0.0
                                                  : -std::numeric_limits<double>::infinity();
    }
    return -std::numeric_limits<double>::infinity();
}

double scalar_prior_mean(const ScalarPrior& prior) {
    switch (prior.kind) {
        case ScalarPrior::Kind::inverse_gamma:
            return prior.a > 1.0 ? prior.b / (prior.a - 1.0) : 1.0;
        case ScalarPrior::Kind::gamma: return prior.a / prior.b;
        case ScalarPrior::Kind::uniform: return 0.5 * (prior.a + prior.b);
    }
    return 1.0;
}

// Shared bookkeeping for samplers that keep per-indication logits.
struct DrawCollector {
    std::size_t n_ind;
    int keep;
    std::vector<double> p_draws;        // keep x I
    std::vector<double> theta_columns;  // I series for rhat, column-major

    DrawCollector(std::size_t n, int k) : n_ind(n), keep(k) {
        p_draws.reserve(static_cast<std::size_t>(k) * n);
        theta_columns.assign(n * static_cast<std::size_t>(k), 0.0);
    }
    void record(const std::vector<double>& theta, int kept_index) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            p_draws.push_back(inv_logit(theta[i]));
            theta_columns[i * static_cast<std::size_t>(keep) + kept_index] = theta[i];
        }
    }
    PosteriorSamples finish() {
        PosteriorSamples out;
        out.n_indications = n_ind;
        out.draws = std::move(p_draws);
        out.rhat.resize(n_ind);
        for (std::size_t i = 0; i < n_ind; ++i) {
            std::vector<double> col(theta_columns.begin() + i * keep,
                                    theta_columns.begin() + (i + 1) * keep);
            out.rhat[i] = split_rhat(col);
        }
        return out;
    }
};

void check_inputs(const std::vector<IndicationData>& data, const std::vector<double>& q0) {
    if (data.empty()) throw std::invalid_argument("fit: empty data");
    if (q0.size() != data.size()) throw std::invalid_argument("fit: q0 size mismatch");
}

}  // namespace

PosteriorSamples fit_independent(const std::vector<IndicationData>& data, const McmcConfig& cfg,
                                 RngStream& rng) {
    if (data.empty()) throw std::invalid_argument("fit_independent: empty data");
    const std::size_t n_ind = data.size();
    PosteriorSamples out;
    out.n_indications = n_ind;
    out.draws.resize(static_cast<std::size_t>(cfg.keep) * n_ind);
    std::vector<BetaParams> post(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) post[i] = indication_posterior(data[i]);
    for (int s = 0; s < cfg.keep; ++s) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            out.draws[static_cast<std::size_t>(s) * n_ind + i] =
                rng.beta(post[i].alpha, post[i].beta);
        }
    }
    out.rhat.assign(n_ind, 1.0);
    return out;
}

PosteriorSamples fit_bhm(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                         const BhmParams& params, const McmcConfig& cfg, RngStream& rng) {
    check_inputs(data, q0);
    const std::size_t n_ind = data.size();
    const double g0 = mean_logit(q0);

    std::vector<double> theta(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) theta[i] = empirical_logit(data[i]);
    double theta0 = g0;
    double sigma2 = 1.0;

    std::vector<AdaptiveScale> scales(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    DrawCollector collector(n_ind, cfg.keep);

    const int total = cfg.burn_in + cfg.keep;
    for (int sweep = 0; sweep < total; ++sweep) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            const double cur = theta[i];
            const double prop = cur + scales[i].scale() * rng.normal();
            const double delta = binom_loglik(prop, data[i].n, data[i].r) -
                                 binom_loglik(cur, data[i].n, data[i].r) +
                                 normal_logpdf(prop, theta0, sigma2) -
                                 normal_logpdf(cur, theta0, sigma2);
            const bool accept = std::isfinite(delta) && std::log(rng.uniform()) < delta;
            if (accept) theta[i] = prop;
            scales[i].record(accept);
        }
        // theta0 | theta, sigma2: conjugate normal
        {
            const double prec = 1.0 / params.theta0_prior_var +
                                static_cast<double>(n_ind) / sigma2;
            double s = 0.0;
            for (double t : theta) s += t;
            const double mean = (g0 / params.theta0_prior_var + s / sigma2) / prec;
            theta0 = rng.normal(mean, std::sqrt(1.0 / prec));
        }
        // sigma2 | theta, theta0: conjugate inverse gamma
        {
            double ss = 0.0;
            for (double t : theta) ss += (t - theta0) * (t - theta0);
            sigma2 = rng.inv_gamma(params.sigma2_shape + 0.5 * static_cast<double>(n_ind),
                                   params.sigma2_rate + 0.5 * ss);
        }
        if (sweep < cfg.burn_in) {
            if ((sweep + 1) % cfg.adapt_window == 0) {
                for (auto& sc : scales) sc.adapt();
            }
        } else {
            collector.record(theta, sweep - cfg.burn_in);
        }
    }
    return collector.finish();
}

PosteriorSamples fit_exnex(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                           const ExnexParams& params, const McmcConfig& cfg, RngStream& rng) {
    check_inputs(data, q0);
    const std::size_t n_ind = data.size();
    const std::vector<double> nex_mean = logits_of(q0);
    const double nex_var = params.nex_var;

    // Uncollapsed mixture: both component values are kept per indication and
    // theta_i selects one. Indicator flips are then driven by the likelihood
    // at the other component's current value, which keeps the chain mobile
    // even when the EX component is tight.
    std::vector<double> m_ex(n_ind), m_nex(n_ind);
    std::vector<int> delta(n_ind);  // 1 = EX, 0 = NEX
    std::vector<double> pi(n_ind, params.fixed_pi.value_or(0.5));
    for (std::size_t i = 0; i < n_ind; ++i) {
        m_ex[i] = empirical_logit(data[i]);
        m_nex[i] = m_ex[i];
        delta[i] = params.init_indicator < 0 ? 1 : params.init_indicator;
    }
    double mu0 = 0.0;
    double sigma02 = std::min(1.0, std::sqrt(params.sigma02_trn_var));
    const double sigma02_lower = params.sigma02_lower;

    std::vector<AdaptiveScale> ex_scales(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    std::vector<AdaptiveScale> nex_scales(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    AdaptiveScale sigma02_scale(0.5, cfg.target_accept);
    DrawCollector collector(n_ind, cfg.keep);
    std::vector<double> theta(n_ind);

    const int total = cfg.burn_in + cfg.keep;
    for (int sweep = 0; sweep < total; ++sweep) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            // EX value: data-informed only while selected
            if (delta[i] == 1) {
                const double cur = m_ex[i];
                const double prop = cur + ex_scales[i].scale() * rng.normal();
                const double d = binom_loglik(prop, data[i].n, data[i].r) -
                                 binom_loglik(cur, data[i].n, data[i].r) +
                                 normal_logpdf(prop, mu0, sigma02) -
                                 normal_logpdf(cur, mu0, sigma02);
                const bool accept = std::isfinite(d) && std::log(rng.uniform()) < d;
                if (accept) m_ex[i] = prop;
                ex_scales[i].record(accept);
            } else {
                m_ex[i] = rng.normal(mu0, std::sqrt(sigma02));
            }
            // NEX value
            if (delta[i] == 0) {
                const double cur = m_nex[i];
                const double prop = cur + nex_scales[i].scale() * rng.normal();
                const double d = binom_loglik(prop, data[i].n, data[i].r) -
                                 binom_loglik(cur, data[i].n, data[i].r) +
                                 normal_logpdf(prop, nex_mean[i], nex_var) -
                                 normal_logpdf(cur, nex_mean[i], nex_var);
                const bool accept = std::isfinite(d) && std::log(rng.uniform()) < d;
                if (accept) m_nex[i] = prop;
                nex_scales[i].record(accept);
            } else {
                m_nex[i] = rng.normal(nex_mean[i], std::sqrt(nex_var));
            }
        }
        // delta_i: exact two-point Gibbs with the data likelihood at each
        // component's current value
        for (std::size_t i = 0; i < n_ind; ++i) {
            if (pi[i] >= 1.0) {
                delta[i] = 1;
                continue;
            }
            if (pi[i] <= 0.0) {
                delta[i] = 0;
                continue;
            }
            const double log_w1 =
                std::log(pi[i]) + binom_loglik(m_ex[i], data[i].n, data[i].r);
            const double log_w0 =
                std::log1p(-pi[i]) + binom_loglik(m_nex[i], data[i].n, data[i].r);
            const double p1 = 1.0 / (1.0 + std::exp(log_w0 - log_w1));
            delta[i] = rng.bernoulli(p1) ? 1 : 0;
        }
        // pi_i: Dir(l1, l2) prior with one Bernoulli observation -> Beta
        if (!params.fixed_pi) {
            for (std::size_t i = 0; i < n_ind; ++i) {
                pi[i] = rng.beta(params.lambda1 + delta[i], params.lambda2 + 1 - delta[i]);
            }
        }
        // mu0 | all EX values: conjugate normal (prior N(0, mu0_prior_var))
        {
            double s = 0.0;
            for (double v : m_ex) s += v;
            const double prec =
                1.0 / params.mu0_prior_var + static_cast<double>(n_ind) / sigma02;
            const double mean = (s / sigma02) / prec;
            mu0 = rng.normal(mean, std::sqrt(1.0 / prec));
        }
        // sigma0^2: truncated-normal prior on the variance itself, so a
        // log-scale random walk over all EX values
        {
            const double cur = sigma02;
            const double prop = cur * std::exp(sigma02_scale.scale() * rng.normal());
            bool accept = false;
            if (prop > sigma02_lower) {
                const double inv2v = 0.5 / params.sigma02_trn_var;
                double d = (cur * cur - prop * prop) * inv2v + std::log(prop) -
                           std::log(cur);  // prior + Jacobian
                for (std::size_t i = 0; i < n_ind; ++i) {
                    d += normal_logpdf(m_ex[i], mu0, prop) - normal_logpdf(m_ex[i], mu0, cur);
                }
                accept = std::isfinite(d) && std::log(rng.uniform()) < d;
            }
            if (accept) sigma02 = prop;
            sigma02_scale.record(accept);
        }
        if (sweep < cfg.burn_in) {
            if ((sweep + 1) % cfg.adapt_window == 0) {
                for (auto& sc : ex_scales) sc.adapt();
                for (auto& sc : nex_scales) sc.adapt();
                sigma02_scale.adapt();
            }
        } else {
            for (std::size_t i = 0; i < n_ind; ++i) {
                theta[i] = delta[i] == 1 ? m_ex[i] : m_nex[i];
            }
            collector.record(theta, sweep - cfg.burn_in);
        }
    }
    return collector.finish();
}

PosteriorSamples fit_liu_bhmm(const std::vector<IndicationData>& data,
                              const std::vector<double>& q0, const std::vector<double>& q1,
                              const LiuBhmmParams& params, const McmcConfig& cfg,
                              RngStream& rng) {
    check_inputs(data, q0);
    if (q1.size() != data.size()) throw std::invalid_argument("fit_liu_bhmm: q1 size mismatch");
    const std::size_t n_ind = data.size();
    const double g1 = mean_logit(q0);
    const double g2 = mean_logit(q1);

    // Uncollapsed two-component mixture, both latent values kept.
    std::vector<double> m1(n_ind), m2(n_ind);
    std::vector<int> delta(n_ind);  // 1 = first (null-centered) component
    for (std::size_t i = 0; i < n_ind; ++i) {
        m1[i] = empirical_logit(data[i]);
        m2[i] = m1[i];
        if (params.init_indicator < 0) {
            delta[i] = std::fabs(m1[i] - g1) <= std::fabs(m1[i] - g2) ? 1 : 0;
        } else {
            delta[i] = params.init_indicator;
        }
    }
    double mu1 = g1, mu2 = g2;
    double s1 = 1.0, s2 = 1.0;  // component variances

    std::vector<AdaptiveScale> scales1(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    std::vector<AdaptiveScale> scales2(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    DrawCollector collector(n_ind, cfg.keep);
    std::vector<double> theta(n_ind);

    const int total = cfg.burn_in + cfg.keep;
    for (int sweep = 0; sweep < total; ++sweep) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            if (delta[i] == 1) {
                const double cur = m1[i];
                const double prop = cur + scales1[i].scale() * rng.normal();
                const double d = binom_loglik(prop, data[i].n, data[i].r) -
                                 binom_loglik(cur, data[i].n, data[i].r) +
                                 normal_logpdf(prop, mu1, s1) - normal_logpdf(cur, mu1, s1);
                const bool accept = std::isfinite(d) && std::log(rng.uniform()) < d;
                if (accept) m1[i] = prop;
                scales1[i].record(accept);
                m2[i] = rng.normal(mu2, std::sqrt(s2));
            } else {
                const double cur = m2[i];
                const double prop = cur + scales2[i].scale() * rng.normal();
                const double d = binom_loglik(prop, data[i].n, data[i].r) -
                                 binom_loglik(cur, data[i].n, data[i].r) +
                                 normal_logpdf(prop, mu2, s2) - normal_logpdf(cur, mu2, s2);
                const bool accept = std::isfinite(d) && std::log(rng.uniform()) < d;
                if (accept) m2[i] = prop;
                scales2[i].record(accept);
                m1[i] = rng.normal(mu1, std::sqrt(s1));
            }
        }
        for (std::size_t i = 0; i < n_ind; ++i) {
            const double log_w1 =
                std::log(params.mix_prob) + binom_loglik(m1[i], data[i].n, data[i].r);
            const double log_w2 =
                std::log1p(-params.mix_prob) + binom_loglik(m2[i], data[i].n, data[i].r);
            const double p1 = 1.0 / (1.0 + std::exp(log_w2 - log_w1));
            delta[i] = rng.bernoulli(p1) ? 1 : 0;
        }
        // Component means and variances are conjugate given all latent values.
        for (int comp = 1; comp <= 2; ++comp) {
            const double prior_mean = comp == 1 ? g1 : g2;
            const double prior_var = comp == 1 ? params.mu1_prior_var : params.mu2_prior_var;
            const std::vector<double>& values = comp == 1 ? m1 : m2;
            double& mu = comp == 1 ? mu1 : mu2;
            double& var = comp == 1 ? s1 : s2;
            double sum = 0.0;
            for (double v : values) sum += v;
            const double prec = 1.0 / prior_var + static_cast<double>(n_ind) / var;
            const double mean = (prior_mean / prior_var + sum / var) / prec;
            mu = rng.normal(mean, std::sqrt(1.0 / prec));
            double ss = 0.0;
            for (double v : values) ss += (v - mu) * (v - mu);
            var = rng.inv_gamma(params.sigma_shape + 0.5 * static_cast<double>(n_ind),
                                params.sigma_rate + 0.5 * ss);
        }
        if (sweep < cfg.burn_in) {
            if ((sweep + 1) % cfg.adapt_window == 0) {
                for (auto& sc : scales1) sc.adapt();
                for (auto& sc : scales2) sc.adapt();
            }
        } else {
            for (std::size_t i = 0; i < n_ind; ++i) {
                theta[i] = delta[i] == 1 ? m1[i] : m2[i];
            }
            collector.record(theta, sweep - cfg.burn_in);
        }
    }
    return collector.finish();
}

namespace {

// Covariance-dependent caches for the CBHM sampler. The precision matrix is
// refreshed only when (sigma2, tau2, phi) move.
struct CbhmCov {
    Matrix prec;
    double log_det = 0.0;
    std::vector<double> prec_one;  // P 1
    double one_prec_one = 0.0;     // 1' P 1
};

bool build_cov(const Matrix& corr, double sigma2, double tau2,
               const std::vector<double>& jitter, Matrix& cov, Matrix& lower) {
    const std::size_t n = corr.rows;
    cov = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cov(i, j) = sigma2 * corr(i, j);
        cov(i, i) += tau2;
    }
    return cholesky_jittered(cov, jitter, lower);
}

CbhmCov finish_cov(const Matrix& lower) {
    CbhmCov c;
    c.prec = inverse_from_cholesky(lower);
    c.log_det = log_det_from_cholesky(lower);
    const std::size_t n = lower.rows;
    c.prec_one.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += c.prec(i, j);
        c.prec_one[i] = s;
        c.one_prec_one += s;
    }
    return c;
}

double quad_from_cholesky(const Matrix& lower, const std::vector<double>& theta, double theta0) {
    const std::size_t n = theta.size();
    std::vector<double> diff(n), z(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = theta[i] - theta0;
    solve_lower(lower, diff.data(), z.data(), n);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += z[i] * z[i];
    return q;
}

}  // namespace

PosteriorSamples fit_cbhm(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                          const std::vector<double>& q1, const CbhmParams& params,
                          const McmcConfig& cfg, RngStream& rng) {
    check_inputs(data, q0);
    if (q1.size() != data.size()) throw std::invalid_argument("fit_cbhm: q1 size mismatch");
    const std::size_t n_ind = data.size();

    double q0_mean = 0.0, q1_mean = 0.0;
    for (std::size_t i = 0; i < n_ind; ++i) {
        q0_mean += q0[i];
        q1_mean += q1[i];
    }
    q0_mean /= static_cast<double>(n_ind);
    q1_mean /= static_cast<double>(n_ind);
    const double mu0 =
        params.mu0_override.value_or(logit(0.5 * (q0_mean + q1_mean)));

    // Tie-break, then fix the distance matrix for the whole chain.
    std::vector<IndicationData> prepped = data;
    if (n_ind >= 2) prepped = preprocess_ties(std::move(prepped), q0_mean, q1_mean).data;
    const Matrix dist = distance_matrix(prepped, params.measure);

    std::vector<double> theta(n_ind);
    for (std::size_t i = 0; i < n_ind; ++i) theta[i] = empirical_logit(data[i]);
    double theta0 = mu0;
    double sigma2 = 1.0;
    double tau2 = 1.0;
    double sigma02 = 1.0;
    double phi = params.phi_fixed.value_or(scalar_prior_mean(params.phi));
    if (!(phi > 0.0)) phi = 1.0;

    Matrix corr = build_corr_matrix(dist, {params.corr, phi});
    Matrix cov, lower;
    if (!build_cov(corr, sigma2, tau2, cfg.jitter_schedule, cov, lower)) {
        throw InitError("fit_cbhm: initial covariance not positive definite");
    }
    CbhmCov cache = finish_cov(lower);
    std::vector<double> resid_prec(n_ind);  // g = P (theta - theta0 1)
    auto refresh_resid = [&]() {
        for (std::size_t i = 0; i < n_ind; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n_ind; ++j) {
                s += cache.prec(i, j) * (theta[j] - theta0);
            }
            resid_prec[i] = s;
        }
    };
    refresh_resid();
    double quad = 0.0;
    for (std::size_t i = 0; i < n_ind; ++i) quad += (theta[i] - theta0) * resid_prec[i];

    std::vector<AdaptiveScale> theta_scales(n_ind, AdaptiveScale(1.0, cfg.target_accept));
    AdaptiveScale sigma2_scale(0.5, cfg.target_accept);
    AdaptiveScale tau2_scale(0.5, cfg.target_accept);
    AdaptiveScale phi_scale(0.5, cfg.target_accept);

    long cov_attempts = 0;
    long cov_failures = 0;

    // Shared move for sigma2 / tau2 / phi: log-scale random walk; a proposal
    // whose covariance stays singular through the jitter ladder is rejected
    // with the state retained.
    auto covariance_move = [&](double& value, const ScalarPrior& prior, bool is_phi,
                               AdaptiveScale& scale) {
        const double cur = value;
        const double prop = cur * std::exp(scale.scale() * rng.normal());
        ++cov_attempts;
        bool accept = false;
        const double prior_delta = scalar_prior_logpdf(prior, prop) -
                                   scalar_prior_logpdf(prior, cur) + std::log(prop) -
                                   std::log(cur);
        if (std::isfinite(prior_delta)) {
            Matrix prop_corr;
            const Matrix* corr_ptr = &corr;
            if (is_phi) {
                prop_corr = build_corr_matrix(dist, {params.corr, prop});
                corr_ptr = &prop_corr;
            }
            const double prop_sigma2 = is_phi ? sigma2 : (&value == &sigma2 ? prop : sigma2);
            const double prop_tau2 = is_phi ? tau2 : (&value == &tau2 ? prop : tau2);
            Matrix prop_cov, prop_lower;
            if (!build_cov(*corr_ptr, prop_sigma2, prop_tau2, cfg.jitter_schedule, prop_cov,
                           prop_lower)) {
                ++cov_failures;
            } else {
                const double prop_quad = quad_from_cholesky(prop_lower, theta, theta0);
                const double prop_logdet = log_det_from_cholesky(prop_lower);
                const double d = -0.5 * (prop_logdet + prop_quad) +
                                 0.5 * (cache.log_det + quad) + prior_delta;
                if (std::isfinite(d) && std::log(rng.uniform()) < d) {
                    accept = true;
                    value = prop;
                    if (is_phi) corr = std::move(prop_corr);
                    lower = std::move(prop_lower);
                    cache = finish_cov(lower);
                    refresh_resid();
                    quad = prop_quad;
                }
            }
        }
        scale.record(accept);
    };

    DrawCollector collector(n_ind, cfg.keep);
    const int total = cfg.burn_in + cfg.keep;
    for (int sweep = 0; sweep < total; ++sweep) {
        for (std::size_t i = 0; i < n_ind; ++i) {
            const double cur = theta[i];
            const double step = theta_scales[i].scale() * rng.normal();
            const double prop = cur + step;
            const double quad_delta =
                2.0 * step * resid_prec[i] + step * step * cache.prec(i, i);
            const double d = binom_loglik(prop, data[i].n, data[i].r) -
                             binom_loglik(cur, data[i].n, data[i].r) - 0.5 * quad_delta;
            const bool accept = std::isfinite(d) && std::log(rng.uniform()) < d;
            if (accept) {
                theta[i] = prop;
                quad += quad_delta;
                for (std::size_t j = 0; j < n_ind; ++j) {
                    resid_prec[j] += step * cache.prec(j, i);
                }
            }
            theta_scales[i].record(accept);
        }
        // theta0: conjugate normal given theta and the covariance
        {
            double sum_g = 0.0;
            for (double v : resid_prec) sum_g += v;
            const double one_prec_theta = sum_g + theta0 * cache.one_prec_one;
            const double prec = cache.one_prec_one + 1.0 / sigma02;
            const double mean = (one_prec_theta + mu0 / sigma02) / prec;
            const double new_theta0 = rng.normal(mean, std::sqrt(1.0 / prec));
            const double d0 = new_theta0 - theta0;
            quad += -2.0 * d0 * sum_g + d0 * d0 * cache.one_prec_one;
            for (std::size_t j = 0; j < n_ind; ++j) resid_prec[j] -= d0 * cache.prec_one[j];
            theta0 = new_theta0;
        }
        // sigma0^2: conjugate inverse gamma with the single theta0 observation
        sigma02 = rng.inv_gamma(params.sigma02_shape + 0.5,
                                params.sigma02_rate + 0.5 * (theta0 - mu0) * (theta0 - mu0));
        covariance_move(sigma2, params.sigma2, false, sigma2_scale);
        covariance_move(tau2, params.tau2, false, tau2_scale);
        if (!params.phi_fixed) covariance_move(phi, params.phi, true, phi_scale);

        if (sweep < cfg.burn_in) {
            if ((sweep + 1) % cfg.adapt_window == 0) {
                for (auto& sc : theta_scales) sc.adapt();
                sigma2_scale.adapt();
                tau2_scale.adapt();
                phi_scale.adapt();
            }
        } else {
            collector.record(theta, sweep - cfg.burn_in);
        }
    }
    if (cov_attempts > 0 &&
        static_cast<double>(cov_failures) > 0.5 * static_cast<double>(cov_attempts)) {
        throw ChainFailure("fit_cbhm: covariance proposals failed Cholesky persistently");
    }
    return collector.finish();
}

PosteriorSamples fit_model(const ModelSpec& spec, const std::vector<IndicationData>& data,
                           const std::vector<double>& q0, const std::vector<double>& q1,
                           const McmcConfig& cfg, RngStream& rng) {
    switch (spec.method) {
        case Method::independent: return fit_independent(data, cfg, rng);
        case Method::bhm: return fit_bhm(data, q0, spec.bhm, cfg, rng);
        case Method::exnex: return fit_exnex(data, q0, spec.exnex, cfg, rng);
        case Method::liu_bhmm: return fit_liu_bhmm(data, q0, q1, spec.liu, cfg, rng);
        case Method::cbhm: return fit_cbhm(data, q0, q1, spec.cbhm, cfg, rng);
    }
    throw std::invalid_argument("fit_model: unknown method");
}

}  // namespace basket
