#pragma once

#include <cstdint>
#include <vector>

namespace basket {

// Splittable pseudo-random stream: xoshiro256++ whose state is derived from
// (seed, stream_id) through a SplitMix64 chain. The same (seed, stream_id)
// reproduces the same draw sequence bit for bit; distinct stream ids give
// statistically independent streams, so replicate i of a simulation can own
// stream i regardless of thread scheduling.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    // Standard normal via the Marsaglia polar method (second deviate cached).
    double normal();
    double normal(double mean, double sd);

    // Marsaglia-Tsang; shape > 0, unit rate.
    double gamma(double shape);
    double gamma(double shape, double rate);

    // X = rate / Gamma(shape, 1); density x^{-shape-1} exp(-rate/x).
    double inv_gamma(double shape, double rate);

    double beta(double a, double b);

    bool bernoulli(double p);
    int binomial(int n, double p);

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream-id layout used by the simulation plumbing. The patient-outcome
// stream keeps method = 0 so every method sees identical data within a
// replicate; analysis streams carry the method index.
enum class StreamPurpose : std::uint64_t {
    patient_data = 1,
    analysis = 2,
    calibration_data = 3,
    calibration_analysis = 4,
    distance_calibration = 5,
};

constexpr std::uint64_t make_stream_id(std::uint64_t replicate,
                                       std::uint64_t method,
                                       StreamPurpose purpose) {
    return (static_cast<std::uint64_t>(purpose) << 56) | ((method & 0xFF) << 48) |
           (replicate & 0xFFFFFFFFFFFFULL);
}

// The pair of streams a single trial replicate consumes: patient outcomes on
// one, posterior computation on the other.
struct ReplicateStreams {
    RngStream data;
    RngStream analysis;
};

inline ReplicateStreams replicate_streams(std::uint64_t seed, std::uint64_t replicate,
                                          std::uint64_t method) {
    return ReplicateStreams{
        RngStream(seed, make_stream_id(replicate, 0, StreamPurpose::patient_data)),
        RngStream(seed, make_stream_id(replicate, method, StreamPurpose::analysis))};
}

}  // namespace basket
