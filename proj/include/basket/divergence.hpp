#pragma once

#include <cstdint>

#include "basket/stats.hpp"

namespace basket {

// Data for one indication: patients enrolled and responders. The responder
// count is real-valued because the tie-breaking preprocessor can shift it off
// the integers.
struct IndicationData {
    double n;
    double r;
};

enum class DistanceMeasure { bhattacharyya, hellinger, symmetrized_kl };

// Beta posterior of the response rate under the given prior (flat by default).
BetaParams indication_posterior(const IndicationData& d, BetaParams prior = {1.0, 1.0});

// Bhattacharyya distance between the response-rate posteriors of two
// indications, closed form in log-Beta functions. Nonnegative, zero iff the
// posteriors coincide.
double b_distance(const IndicationData& di, const IndicationData& dj,
                  BetaParams prior = {1.0, 1.0});

// Hellinger distance sqrt(1 - BC), in [0, 1).
double h_distance(const IndicationData& di, const IndicationData& dj,
                  BetaParams prior = {1.0, 1.0});

// Symmetrized Kullback-Leibler distance, closed form with digamma terms.
double kl_distance(const IndicationData& di, const IndicationData& dj,
                   BetaParams prior = {1.0, 1.0});

double distance(DistanceMeasure measure, const IndicationData& di, const IndicationData& dj,
                BetaParams prior = {1.0, 1.0});

// Independent check of the closed forms: evaluates the defining integral by
// composite Gauss-Legendre quadrature after the substitution p = sin^2(t),
// which removes the endpoint behavior of the densities. grid_points counts
// integrand evaluations (>= 1e4 recommended).
double numeric_distance_oracle(DistanceMeasure measure, const IndicationData& di,
                               const IndicationData& dj, std::int64_t grid_points,
                               BetaParams prior = {1.0, 1.0});

}  // namespace basket
