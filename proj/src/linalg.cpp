#include "basket/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "basket/errors.hpp"

namespace basket {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool cholesky(const Matrix& sym, Matrix& lower) {
    const std::size_t n = sym.rows;
    if (sym.cols != n) throw std::invalid_argument("cholesky: matrix must be square");
    lower = Matrix(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = sym(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = sym(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return true;
}

bool cholesky_jittered(const Matrix& sym, const std::vector<double>& schedule, Matrix& lower) {
    const std::size_t n = sym.rows;
    double mean_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_diag += sym(i, i);
    mean_diag /= static_cast<double>(n > 0 ? n : 1);

    for (double rung : schedule) {
        if (rung == 0.0) {
            if (cholesky(sym, lower)) return true;
            continue;
        }
        Matrix bumped = sym;
        for (std::size_t i = 0; i < n; ++i) bumped(i, i) += rung * mean_diag;
        if (cholesky(bumped, lower)) return true;
    }
    return false;
}

double log_det_from_cholesky(const Matrix& lower) {
    double s = 0.0;
    for (std::size_t i = 0; i < lower.rows; ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

void solve_lower(const Matrix& lower, const double* b, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * x[k];
        x[i] = s / lower(i, i);
    }
}

Matrix inverse_from_cholesky(const Matrix& lower) {
    const std::size_t n = lower.rows;
    // Invert L by forward substitution, then A^{-1} = L^{-T} L^{-1}.
    Matrix linv(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / lower(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= lower(i, k) * linv(k, j);
            linv(i, j) = s / lower(i, i);
        }
    }
    Matrix inv(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) s += linv(k, i) * linv(k, j);
            inv(i, j) = s;
            inv(j, i) = s;
        }
    }
    return inv;
}

double mvn_logpdf(const std::vector<double>& x, const std::vector<double>& mean,
                  const Matrix& cov, const std::vector<double>& jitter_schedule) {
    const std::size_t n = x.size();
    if (mean.size() != n || cov.rows != n || cov.cols != n) {
        throw std::invalid_argument("mvn_logpdf: dimension mismatch");
    }
    Matrix lower;
    if (!cholesky_jittered(cov, jitter_schedule, lower)) {
        throw SingularCovariance("mvn_logpdf: covariance not positive definite after jitter");
    }
    std::vector<double> diff(n), z(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - mean[i];
    solve_lower(lower, diff.data(), z.data(), n);
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) quad += z[i] * z[i];
    constexpr double kLog2Pi = 1.83787706640934548356;
    return -0.5 * (static_cast<double>(n) * kLog2Pi + log_det_from_cholesky(lower) + quad);
}

}  // namespace basket
