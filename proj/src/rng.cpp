#include "basket/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace basket {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& z) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t w = z;
    w = (w ^ (w >> 30)) * 0xbf58476d1ce4e5b9ULL;
    w = (w ^ (w >> 27)) * 0x94d049bb133111ebULL;
    return w ^ (w >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    // Fold the stream id into the SplitMix64 chain so streams differing in a
    // single bit land in unrelated regions of the state space.
    std::uint64_t z = seed;
    (void)splitmix64(z);
    z ^= stream_id * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
    for (auto& s : state_) s = splitmix64(z);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() {
    // (next >> 11) is uniform on {0, ..., 2^53 - 1}; the half-step keeps the
    // result strictly inside (0, 1) so logs stay finite.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RngStream::normal(double mean, double sd) {
    return mean + sd * normal();
}

double RngStream::gamma(double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a + 1) * U^{1/a}
        return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::gamma(double shape, double rate) {
    return gamma(shape) / rate;
}

double RngStream::inv_gamma(double shape, double rate) {
    return rate / gamma(shape);
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

bool RngStream::bernoulli(double p) {
    return uniform() < p;
}

int RngStream::binomial(int n, double p) {
    // Trial sizes in this library are tens of patients; a direct Bernoulli sum
    // keeps the draw count (and thus the stream position) trivially auditable.
    int r = 0;
    for (int i = 0; i < n; ++i) r += bernoulli(p) ? 1 : 0;
    return r;
}

}  // namespace basket
