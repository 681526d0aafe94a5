#include "basket/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "basket/special.hpp"

namespace basket {

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: p must lie in (0,1)");
    return std::log(p / (1.0 - p));
}

double inv_logit(double x) {
    // Evaluate from the stable side so large |x| never overflows, and keep
    // the result strictly inside (0, 1) even when exp underflows.
    double v;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        v = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(x);
        v = e / (1.0 + e);
    }
    if (v <= 0.0) return std::numeric_limits<double>::min();
    if (v >= 1.0) return std::nextafter(1.0, 0.0);
    return v;
}

BetaParams beta_posterior(double n, double r, BetaParams prior) {
    if (!(prior.alpha > 0.0) || !(prior.beta > 0.0)) {
        throw std::domain_error("beta_posterior: prior shapes must be positive");
    }
    if (r < 0.0 || r > n) throw std::invalid_argument("beta_posterior: need 0 <= r <= n");
    return BetaParams{prior.alpha + r, prior.beta + n - r};
}

double beta_tail_prob(BetaParams params, double threshold) {
    if (!(params.alpha > 0.0) || !(params.beta > 0.0)) {
        throw std::domain_error("beta_tail_prob: shapes must be positive");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::domain_error("beta_tail_prob: threshold outside [0,1]");
    }
    return 1.0 - reg_inc_beta(params.alpha, params.beta, threshold);
}

double beta_mean(BetaParams params) {
    return params.alpha / (params.alpha + params.beta);
}

double normal_logpdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * 3.14159265358979323846 * var) + d * d / var);
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile_type7: empty sample");
    if (p < 0.0 || p > 1.0) throw std::domain_error("quantile_type7: p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace basket
