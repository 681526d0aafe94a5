#include "basket/divergence.hpp"

#include <cmath>
#include <stdexcept>

#include "basket/errors.hpp"
#include "basket/special.hpp"

namespace basket {

namespace {

void check_data(const IndicationData& d) {
    if (!(d.n >= 0.0) || d.r < 0.0 || d.r > d.n) {
        throw std::invalid_argument("IndicationData: need 0 <= r <= n");
    }
}

}  // namespace

BetaParams indication_posterior(const IndicationData& d, BetaParams prior) {
    check_data(d);
    return beta_posterior(d.n, d.r, prior);
}

double b_distance(const IndicationData& di, const IndicationData& dj, BetaParams prior) {
    const BetaParams fi = indication_posterior(di, prior);
    const BetaParams fj = indication_posterior(dj, prior);
    // -log BC with BC = B((ai+aj)/2, (bi+bj)/2) / sqrt(B(ai,bi) B(aj,bj)).
    const double log_bc = log_beta_fn(0.5 * (fi.alpha + fj.alpha), 0.5 * (fi.beta + fj.beta)) -
                          0.5 * (log_beta_fn(fi.alpha, fi.beta) + log_beta_fn(fj.alpha, fj.beta));
    const double d = -log_bc;
    return d < 0.0 ? 0.0 : d;  // clip roundoff at identical posteriors
}

double h_distance(const IndicationData& di, const IndicationData& dj, BetaParams prior) {
    const double b = b_distance(di, dj, prior);
    return std::sqrt(-std::expm1(-b));
}

namespace {

// KL(Beta(a1,b1) || Beta(a2,b2)) in closed form.
double beta_kl(const BetaParams& f1, const BetaParams& f2) {
    return log_beta_fn(f2.alpha, f2.beta) - log_beta_fn(f1.alpha, f1.beta) +
           (f1.alpha - f2.alpha) * digamma(f1.alpha) + (f1.beta - f2.beta) * digamma(f1.beta) +
           (f2.alpha - f1.alpha + f2.beta - f1.beta) * digamma(f1.alpha + f1.beta);
}

}  // namespace

double kl_distance(const IndicationData& di, const IndicationData& dj, BetaParams prior) {
    const BetaParams fi = indication_posterior(di, prior);
    const BetaParams fj = indication_posterior(dj, prior);
    const double d = 0.5 * (beta_kl(fi, fj) + beta_kl(fj, fi));
    return d < 0.0 ? 0.0 : d;
}

double distance(DistanceMeasure measure, const IndicationData& di, const IndicationData& dj,
                BetaParams prior) {
    switch (measure) {
        case DistanceMeasure::bhattacharyya: return b_distance(di, dj, prior);
        case DistanceMeasure::hellinger: return h_distance(di, dj, prior);
        case DistanceMeasure::symmetrized_kl: return kl_distance(di, dj, prior);
    }
    throw std::invalid_argument("distance: unknown measure");
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

struct LogBetaPdf {
    double a, b, log_norm;
    explicit LogBetaPdf(BetaParams p)
        : a(p.alpha), b(p.beta), log_norm(log_beta_fn(p.alpha, p.beta)) {}
    double operator()(double p) const {
        return (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p) - log_norm;
    }
};

// Integrate g(p) over (0, 1) with p = sin^2(t), t in (0, pi/2). The Jacobian
// sin(2t) vanishes at both ends, taming the log singularities the KL
// integrand can have when a shape equals 1.
template <typename F>
double integrate_unit(F&& g, std::int64_t grid_points) {
    const std::int64_t panels = grid_points / 8 > 0 ? grid_points / 8 : 1;
    const double half_pi = 1.57079632679489661923;
    const double h = half_pi / static_cast<double>(panels);
    double sum = 0.0;
    for (std::int64_t k = 0; k < panels; ++k) {
        const double mid = (static_cast<double>(k) + 0.5) * h;
        double panel = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double t = mid + 0.5 * h * kGlNode[q];
            const double s = std::sin(t);
            const double p = s * s;
            panel += kGlWeight[q] * g(p) * std::sin(2.0 * t);
        }
        sum += 0.5 * h * panel;
    }
    if (!std::isfinite(sum)) {
        throw NumericalError("numeric_distance_oracle: integrand accumulated non-finite values");
    }
    return sum;
}

}  // namespace

double numeric_distance_oracle(DistanceMeasure measure, const IndicationData& di,
                               const IndicationData& dj, std::int64_t grid_points,
                               BetaParams prior) {
    const LogBetaPdf log_fi(indication_posterior(di, prior));
    const LogBetaPdf log_fj(indication_posterior(dj, prior));
    switch (measure) {
        case DistanceMeasure::bhattacharyya: {
            const double bc = integrate_unit(
                [&](double p) { return std::exp(0.5 * (log_fi(p) + log_fj(p))); }, grid_points);
            return bc >= 1.0 ? 0.0 : -std::log(bc);
        }
        case DistanceMeasure::hellinger: {
            // 1 - BC = (1/2) integral (sqrt(fi) - sqrt(fj))^2; the difference
            // form stays accurate when the posteriors nearly coincide.
            const double sq = integrate_unit(
                [&](double p) {
                    const double d =
                        std::exp(0.5 * log_fi(p)) - std::exp(0.5 * log_fj(p));
                    return d * d;
                },
                grid_points);
            return std::sqrt(0.5 * sq);
        }
        case DistanceMeasure::symmetrized_kl: {
            const double kl_ij = integrate_unit(
                [&](double p) {
                    const double li = log_fi(p);
                    return std::exp(li) * (li - log_fj(p));
                },
                grid_points);
            const double kl_ji = integrate_unit(
                [&](double p) {
                    const double lj = log_fj(p);
                    return std::exp(lj) * (lj - log_fi(p));
                },
                grid_points);
            return 0.5 * (kl_ij + kl_ji);
        }
    }
    throw std::invalid_argument("numeric_distance_oracle: unknown measure");
}

}  // namespace basket
