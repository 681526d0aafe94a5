#pragma once

// Test-only quadrature oracles for posterior means of the decoupled model
// limits. Everything here integrates on dense grids, independent of the
// samplers under test.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double inv_logit(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double binom_loglik(double theta, double n, double r) {
    return r * theta - n * softplus(theta);
}

// E[inv_logit(theta)] for posterior density proportional to
// exp(binom_loglik) * N(theta; m, v), by trapezoid on a wide grid.
inline double logit_normal_posterior_mean(double n, double r, double m, double v,
                                          int points = 40001) {
    const double lo = -20.0, hi = 15.0;
    const double h = (hi - lo) / (points - 1);
    double num = 0.0, den = 0.0, peak = -1e300;
    std::vector<double> logw(points);
    for (int i = 0; i < points; ++i) {
        const double t = lo + i * h;
        logw[i] = binom_loglik(t, n, r) - 0.5 * (t - m) * (t - m) / v;
        if (logw[i] > peak) peak = logw[i];
    }
    for (int i = 0; i < points; ++i) {
        const double w = std::exp(logw[i] - peak);
        num += w * inv_logit(lo + i * h);
        den += w;
    }
    return num / den;
}

// E[inv_logit(theta)] for density exp(binom_loglik(theta)) * prior(theta, u)
// integrated over u (an auxiliary log-variance), trapezoid in both variables.
// log_joint_prior(theta, u) must include the Jacobian of u.
inline double posterior_mean_2d(
    double n, double r, const std::function<double(double, double)>& log_joint_prior,
    double u_lo, double u_hi, int theta_points = 1601, int u_points = 1601) {
    const double t_lo = -16.0, t_hi = 12.0;
    const double ht = (t_hi - t_lo) / (theta_points - 1);
    const double hu = (u_hi - u_lo) / (u_points - 1);
    double peak = -1e300;
    std::vector<double> logw(static_cast<std::size_t>(theta_points) * u_points);
    for (int i = 0; i < theta_points; ++i) {
        const double t = t_lo + i * ht;
        const double lik = binom_loglik(t, n, r);
        for (int j = 0; j < u_points; ++j) {
            const double lw = lik + log_joint_prior(t, u_lo + j * hu);
            logw[static_cast<std::size_t>(i) * u_points + j] = lw;
            if (lw > peak) peak = lw;
        }
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < theta_points; ++i) {
        const double p = inv_logit(t_lo + i * ht);
        for (int j = 0; j < u_points; ++j) {
            const double w = std::exp(logw[static_cast<std::size_t>(i) * u_points + j] - peak);
            num += w * p;
            den += w;
        }
    }
    return num / den;
}

struct ChainStats {
    double grand_mean = 0.0;
    double se = 0.0;  // standard error of the mean over chains
};

inline ChainStats chain_stats(const std::vector<double>& chain_means) {
    ChainStats s;
    const double k = static_cast<double>(chain_means.size());
    for (double m : chain_means) s.grand_mean += m;
    s.grand_mean /= k;
    double var = 0.0;
    for (double m : chain_means) var += (m - s.grand_mean) * (m - s.grand_mean);
    var /= (k - 1.0);
    s.se = std::sqrt(var / k);
    return s;
}

}  // namespace oracle
