#pragma once

#include <stdexcept>
#include <string>

namespace basket {

// Error taxonomy shared across the library. Domain violations on scalar
// arguments use std::domain_error / std::invalid_argument directly.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Covariance matrix not positive definite after the full jitter schedule.
struct SingularCovariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Log posterior non-finite at the initial state.
struct InitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampler lost: non-finite log posterior mid-chain, or covariance proposals
// failing persistently.
struct ChainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace basket
