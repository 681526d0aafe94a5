#pragma once

#include <string>
#include <vector>

#include "basket/divergence.hpp"
#include "basket/linalg.hpp"

namespace basket {

enum class CorrelationKind { exponential, squared_exponential };

// Correlation as a function of distance: exp(-phi d) or exp(-phi d^2).
struct CorrelationFn {
    CorrelationKind kind = CorrelationKind::exponential;
    double phi = 1.0;
};

double correlation(const CorrelationFn& fn, double d);

// Pairwise distance matrix between indication posteriors (zero diagonal,
// symmetric).
Matrix distance_matrix(const std::vector<IndicationData>& data, DistanceMeasure measure,
                       BetaParams prior = {1.0, 1.0});

// Elementwise correlation of a distance matrix; unit diagonal. Positive
// definiteness is the caller's concern (jitter policy in the sampler).
Matrix build_corr_matrix(const Matrix& dist, const CorrelationFn& fn);

// Tie-broken data plus a log of the adjustments made.
struct PreprocessResult {
    std::vector<IndicationData> data;
    std::vector<std::string> log;
};

// Breaks groups of equal sample response rates by shifting responder counts
// with epsilon = 3 (q1 - q0) / I, so the distance matrix downstream has
// strictly positive off-diagonal entries. Idempotent on already-distinct
// input. A shift that would push r past n is clamped to n - epsilon/10 and
// recorded in the log.
PreprocessResult preprocess_ties(std::vector<IndicationData> data, double q0, double q1);

}  // namespace basket
