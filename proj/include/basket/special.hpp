#pragma once

namespace basket {

// Natural log of the Gamma function for x > 0 (Lanczos approximation, g = 7,
// 9-term Godfrey coefficient set).
double log_gamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b); a, b > 0.
double log_beta_fn(double a, double b);

// Digamma psi(x) for x > 0: recurrence shift below 6, then the asymptotic
// Bernoulli series.
double digamma(double x);

// Regularized lower incomplete beta I_x(a, b) via the Lentz continued
// fraction, with the symmetry switch at x = (a + 1) / (a + b + 2).
double reg_inc_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x) (series below a + 1, continued
// fraction above).
double reg_inc_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, int df);

double log_binom_coef(int n, int k);
double binom_pmf(int k, int n, double p);

// P(X > k) for X ~ Binomial(n, p); k < 0 gives 1, k >= n gives 0.
double binom_sf(int k, int n, double p);

}  // namespace basket
