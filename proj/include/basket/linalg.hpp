#pragma once

#include <cstddef>
#include <vector>

namespace basket {

// Minimal dense row-major matrix. Basket sizes are a handful of indications,
// so everything here is written for small n.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Matrix identity(std::size_t n);
};

// In-place lower Cholesky of a symmetric matrix; returns false if a pivot is
// not strictly positive. On success `lower` holds L with A = L L^T.
bool cholesky(const Matrix& sym, Matrix& lower);

// Default jitter ladder: multiples of the mean diagonal added to the diagonal
// before each retry.
inline const std::vector<double>& default_jitter_schedule() {
    static const std::vector<double> ladder = {0.0, 1e-10, 1e-8, 1e-6};
    return ladder;
}

// Cholesky with the jitter ladder. Returns false if every rung fails.
bool cholesky_jittered(const Matrix& sym, const std::vector<double>& schedule, Matrix& lower);

// log det A = 2 sum log L_ii for A = L L^T.
double log_det_from_cholesky(const Matrix& lower);

void solve_lower(const Matrix& lower, const double* b, double* x, std::size_t n);

// Inverse of A from its Cholesky factor (A = L L^T), returned dense symmetric.
Matrix inverse_from_cholesky(const Matrix& lower);

// Exact multivariate normal log density. Throws SingularCovariance if the
// covariance fails the full jitter schedule.
double mvn_logpdf(const std::vector<double>& x, const std::vector<double>& mean,
                  const Matrix& cov,
                  const std::vector<double>& jitter_schedule = default_jitter_schedule());

}  // namespace basket
