#include "basket/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "basket/errors.hpp"

namespace basket {

double correlation(const CorrelationFn& fn, double d) {
    if (!(fn.phi > 0.0)) throw std::domain_error("correlation: phi must be positive");
    if (d < 0.0) throw std::domain_error("correlation: distance must be nonnegative");
    switch (fn.kind) {
        case CorrelationKind::exponential: return std::exp(-fn.phi * d);
        case CorrelationKind::squared_exponential: return std::exp(-fn.phi * d * d);
    }
    throw std::invalid_argument("correlation: unknown kind");
}

Matrix distance_matrix(const std::vector<IndicationData>& data, DistanceMeasure measure,
                       BetaParams prior) {
    const std::size_t n = data.size();
    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = distance(measure, data[i], data[j], prior);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

Matrix build_corr_matrix(const Matrix& dist, const CorrelationFn& fn) {
    Matrix r(dist.rows, dist.cols, 0.0);
    for (std::size_t i = 0; i < dist.rows; ++i) {
        r(i, i) = 1.0;
        for (std::size_t j = i + 1; j < dist.cols; ++j) {
            const double v = correlation(fn, dist(i, j));
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

namespace {

// Exact tie predicate on sample rates: cross-multiplied, so integer inputs
// never suffer division roundoff.
bool same_rate(const IndicationData& a, const IndicationData& b) {
    return a.r * b.n == b.r * a.n;
}

// One pass of the tie-break rule; returns true if anything changed.
bool break_ties_once(std::vector<IndicationData>& data, double eps,
                     std::vector<std::string>& log) {
    const std::size_t n = data.size();
    std::vector<bool> handled(n, false);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (handled[i]) continue;
        std::vector<std::size_t> group{i};
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!handled[j] && same_rate(data[i], data[j])) group.push_back(j);
        }
        for (std::size_t g : group) handled[g] = true;
        if (group.size() < 2) continue;
        changed = true;
        for (std::size_t k = 0; k < group.size(); ++k) {
            const std::size_t idx = group[k];
            double shifted = data[idx].r + eps * static_cast<double>(k + 1);
            if (shifted > data[idx].n) {
                // Graded backward clamp keeps clamped members distinct too.
                shifted = data[idx].n - (eps / 10.0) * static_cast<double>(k + 1);
                log.push_back("indication " + std::to_string(idx + 1) +
                              ": tie shift exceeded n, clamped r to " + std::to_string(shifted));
            }
            data[idx].r = shifted;
        }
    }
    return changed;
}

}  // namespace

PreprocessResult preprocess_ties(std::vector<IndicationData> data, double q0, double q1) {
    if (data.size() < 2) return PreprocessResult{std::move(data), {}};
    if (!(q1 > q0)) throw std::invalid_argument("preprocess_ties: need q0 < q1");
    const double eps = 3.0 * (q1 - q0) / static_cast<double>(data.size());

    PreprocessResult out;
    out.data = std::move(data);
    for (int pass = 0; pass < 8; ++pass) {
        if (!break_ties_once(out.data, eps, out.log)) return out;
    }
    // A shifted rate landing exactly on another group's rate is resolved by
    // the next pass; eight passes not sufficing means something is wrong.
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        for (std::size_t j = i + 1; j < out.data.size(); ++j) {
            if (same_rate(out.data[i], out.data[j])) {
                throw NumericalError("preprocess_ties: could not separate sample rates");
            }
        }
    }
    return out;
}

}  // namespace basket
