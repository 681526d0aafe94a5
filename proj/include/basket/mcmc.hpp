#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "basket/rng.hpp"

namespace basket {

struct McmcConfig {
    int burn_in = 5000;
    int keep = 10000;
    int adapt_window = 50;           // sweeps per adaptation batch
    double target_accept = 0.44;     // scalar updates
    double target_accept_block = 0.23;
    std::vector<double> jitter_schedule = {0.0, 1e-10, 1e-8, 1e-6};
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// Robbins-Monro scale adaptation for one random-walk coordinate. Scales move
// toward the target acceptance rate during burn-in and freeze afterwards.
class AdaptiveScale {
public:
    explicit AdaptiveScale(double initial = 1.0, double target = 0.44)
        : log_scale_(std::log(initial)), target_(target) {}

    double scale() const { return std::exp(log_scale_); }
    void record(bool accepted) {
        ++attempts_;
        if (accepted) ++accepts_;
        ++batch_attempts_;
        if (accepted) ++batch_accepts_;
    }
    // Call at the end of each adaptation batch during burn-in.
    void adapt() {
        if (batch_attempts_ == 0) return;
        ++batches_;
        const double rate = static_cast<double>(batch_accepts_) / batch_attempts_;
        const double step = std::min(0.05, 1.0 / std::sqrt(static_cast<double>(batches_)));
        log_scale_ += (rate > target_) ? step : -step;
        batch_accepts_ = 0;
        batch_attempts_ = 0;
    }
    double acceptance_rate() const {
        return attempts_ == 0 ? 0.0 : static_cast<double>(accepts_) / attempts_;
    }
    void reset_counts() {
        attempts_ = accepts_ = 0;
    }

private:
    double log_scale_;
    double target_;
    long attempts_ = 0, accepts_ = 0;
    long batch_attempts_ = 0, batch_accepts_ = 0;
    long batches_ = 0;
};

struct Chain {
    std::vector<double> samples;  // keep x dim, row-major
    std::size_t dim = 0;
    std::vector<double> acceptance;  // per coordinate, post burn-in

    double at(std::size_t s, std::size_t d) const { return samples[s * dim + d]; }
    std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
};

using LogDensity = std::function<double(const std::vector<double>&)>;

// Adaptive random-walk Metropolis, one coordinate at a time per sweep.
// Throws InitError when logpost(init) is not finite and ChainFailure when the
// target turns non-finite mid-run.
Chain run_mcmc(const LogDensity& logpost, std::vector<double> init, const McmcConfig& cfg,
               RngStream& rng);

// Split-chain potential scale reduction factor of one scalar series.
double split_rhat(const std::vector<double>& draws);

}  // namespace basket
