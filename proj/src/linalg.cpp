#include "typology/linalg.hpp"

#include <cmath>
#include <utility>

#include "typology/errors.hpp"
#include "typology/kernels.hpp"

namespace typology {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

void cholesky_solve_inplace(const Matrix& lower, Matrix& b) {
    const std::size_t n = lower.rows();
    const std::size_t k = b.cols();
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < i; ++p) {
            const double l = lower(i, p);
            if (l == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) b(i, c) -= l * b(p, c);
        }
        for (std::size_t c = 0; c < k; ++c) b(i, c) /= lower(i, i);
    }
    // L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t p = ii + 1; p < n; ++p) {
            const double l = lower(p, ii);
            if (l == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) b(ii, c) -= l * b(p, c);
        }
        for (std::size_t c = 0; c < k; ++c) b(ii, c) /= lower(ii, ii);
    }
}

Matrix solve_lu(Matrix a, Matrix b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n) throw ContractError("solve_lu: shape mismatch");
    const std::size_t k = b.cols();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0 || !std::isfinite(a(pivot, col)))
            throw NumericError("singular linear system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            for (std::size_t c = 0; c < k; ++c) std::swap(b(col, c), b(pivot, c));
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            for (std::size_t c = 0; c < k; ++c) b(r, c) -= f * b(col, c);
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t p = ii + 1; p < n; ++p)
            for (std::size_t c = 0; c < k; ++c) b(ii, c) -= a(ii, p) * b(p, c);
        for (std::size_t c = 0; c < k; ++c) b(ii, c) /= a(ii, ii);
    }
    return b;
}

Matrix solve_spd(Matrix a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != a.rows()) throw ContractError("solve_spd: shape mismatch");
    Matrix factor = a;
    if (kernels::cholesky(factor)) {
        Matrix x = b;
        cholesky_solve_inplace(factor, x);
        return x;
    }
    return solve_lu(std::move(a), b);
}

}  // namespace typology
