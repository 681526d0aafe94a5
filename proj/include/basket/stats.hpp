#pragma once

#include <vector>

namespace basket {

// Shape parameters of a Beta distribution; both strictly positive.
struct BetaParams {
    double alpha;
    double beta;
};

// theta = log(p / (1 - p)); requires 0 < p < 1.
double logit(double p);

// Inverse link, monotone with range (0, 1).
double inv_logit(double x);

// Conjugate update: Beta(alpha + r, beta + n - r). Requires 0 <= r <= n.
BetaParams beta_posterior(double n, double r, BetaParams prior = {1.0, 1.0});

// Pr(X > threshold) for X ~ Beta(params); threshold in [0, 1].
double beta_tail_prob(BetaParams params, double threshold);

double beta_mean(BetaParams params);

// N(x | mean, var) log density.
double normal_logpdf(double x, double mean, double var);

// Type-7 quantile (linear interpolation between order statistics). Sorts a
// copy of the input; p in [0, 1].
double quantile_type7(std::vector<double> values, double p);

double mean_of(const std::vector<double>& v);
double sd_of(const std::vector<double>& v);

}  // namespace basket
