#pragma once

#include <optional>
#include <string>
#include <vector>

#include "basket/divergence.hpp"
#include "basket/kernel.hpp"
#include "basket/mcmc.hpp"
#include "basket/rng.hpp"

namespace basket {

enum class Method { independent, bhm, exnex, liu_bhmm, cbhm };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Conventional hierarchical model: theta_i ~ N(theta0, sigma^2),
// theta0 ~ N(g0, theta0_prior_var), sigma^2 ~ IG(shape, rate).
struct BhmParams {
    double theta0_prior_var = 1000.0;
    double sigma2_shape = 0.001;
    double sigma2_rate = 0.001;
};

// Mixture of one exchangeable component with sampled (mu0, sigma0^2) and a
// nonexchangeable component pinned at (logit q0i, nex_var) per indication.
struct ExnexParams {
    double mu0_prior_var = 5.0;
    double nex_var = 1.0 / 0.15;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    // Truncated-normal prior on the EX variance: TrN(0, sigma02_trn_var)
    // restricted to (sigma02_lower, inf). The default follows the reference
    // implementation's precision-100 normal.
    double sigma02_trn_var = 0.01;
    double sigma02_lower = 0.001;
    // Mixture weight fixed instead of Dirichlet-sampled (used by the
    // degenerate-limit checks).
    std::optional<double> fixed_pi;
    int init_indicator = -1;  // -1 empirical, else force 0/1 at start
};

// Two-component mixture with unknown component means and variances.
struct LiuBhmmParams {
    double mu1_prior_var = 1.0 / 0.42;
    double mu2_prior_var = 1.0 / 0.57;
    double sigma_shape = 0.1;
    double sigma_rate = 0.1;
    double mix_prob = 0.5;
    int init_indicator = -1;
};

struct ScalarPrior {
    enum class Kind { inverse_gamma, gamma, uniform };
    Kind kind = Kind::inverse_gamma;
    double a = 0.01;  // shape (IG / gamma) or lower bound (uniform)
    double b = 0.01;  // rate  (IG / gamma) or upper bound (uniform)

    static ScalarPrior inverse_gamma(double shape, double rate) {
        return {Kind::inverse_gamma, shape, rate};
    }
    static ScalarPrior gamma(double shape, double rate = 1.0) {
        return {Kind::gamma, shape, rate};
    }
    static ScalarPrior uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
};

// Correlated-prior hierarchical model. The correlated effects are kept
// marginalized: theta ~ MVN(theta0 * 1, sigma^2 R(phi) + tau^2 I).
struct CbhmParams {
    DistanceMeasure measure = DistanceMeasure::bhattacharyya;
    CorrelationKind corr = CorrelationKind::exponential;
    ScalarPrior phi = ScalarPrior::gamma(1.0);
    ScalarPrior sigma2 = ScalarPrior::inverse_gamma(0.01, 0.01);
    ScalarPrior tau2 = ScalarPrior::inverse_gamma(0.01, 0.01);
    double sigma02_shape = 0.1;
    double sigma02_rate = 0.1;
    std::optional<double> mu0_override;
    std::optional<double> phi_fixed;  // pin the range parameter (tests)
};

struct ModelSpec {
    Method method = Method::cbhm;
    BhmParams bhm;
    ExnexParams exnex;
    LiuBhmmParams liu;
    CbhmParams cbhm;
};

// Retained response-rate draws, one column per indication, all in (0, 1).
struct PosteriorSamples {
    std::size_t n_indications = 0;
    std::vector<double> draws;  // n_draws x n_indications, row-major
    std::vector<double> rhat;   // split-chain PSRF of the logit draws

    std::size_t n_draws() const {
        return n_indications == 0 ? 0 : draws.size() / n_indications;
    }
    double at(std::size_t s, std::size_t i) const { return draws[s * n_indications + i]; }
    double mean(std::size_t i) const;
    double sd(std::size_t i) const;
};

// Fraction of draws with p_i > t.
double posterior_prob_exceeds(const PosteriorSamples& samples, std::size_t i, double t);

// Independent beta-binomial: i.i.d. conjugate draws, no MCMC.
PosteriorSamples fit_independent(const std::vector<IndicationData>& data, const McmcConfig& cfg,
                                 RngStream& rng);

PosteriorSamples fit_bhm(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                         const BhmParams& params, const McmcConfig& cfg, RngStream& rng);

PosteriorSamples fit_exnex(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                           const ExnexParams& params, const McmcConfig& cfg, RngStream& rng);

PosteriorSamples fit_liu_bhmm(const std::vector<IndicationData>& data,
                              const std::vector<double>& q0, const std::vector<double>& q1,
                              const LiuBhmmParams& params, const McmcConfig& cfg, RngStream& rng);

// Applies the tie-break preprocessor internally before building distances.
PosteriorSamples fit_cbhm(const std::vector<IndicationData>& data, const std::vector<double>& q0,
                          const std::vector<double>& q1, const CbhmParams& params,
                          const McmcConfig& cfg, RngStream& rng);

PosteriorSamples fit_model(const ModelSpec& spec, const std::vector<IndicationData>& data,
                           const std::vector<double>& q0, const std::vector<double>& q1,
                           const McmcConfig& cfg, RngStream& rng);

}  // namespace basket
