#include "typology/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace typology::kernels {

namespace {

// Fixed-order dot product shared by the serial and parallel kernels.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void gram_row(const Matrix& z, Matrix& out, std::size_t i) {
    const std::size_t d = z.cols();
    const double* zi = z.row(i).data();
    for (std::size_t j = 0; j <= i; ++j) out(i, j) = dot(zi, z.row(j).data(), d);
}

inline void mirror_lower(Matrix& out) {
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) out(j, i) = out(i, j);
}

inline void multiply_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
    double* o = out.row(i).data();
    const double* ai = a.row(i).data();
    const std::size_t k = b.cols();
    for (std::size_t p = 0; p < a.cols(); ++p) {
        const double s = ai[p];
        if (s == 0.0) continue;
        const double* bp = b.row(p).data();
        for (std::size_t c = 0; c < k; ++c) o[c] += s * bp[c];
    }
}

inline void moments_column(const Matrix& x, ColumnMoments& m, std::size_t c) {
    const std::size_t n = x.rows();
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double d = x(r, c) - mean;
        ss += d * d;
    }
    m.mean[c] = mean;
    m.stddev[c] = std::sqrt(ss / static_cast<double>(n));
}

inline bool cholesky_diag(Matrix& a, std::size_t k) {
    const double* lk = a.row(k).data();
    const double v = a(k, k) - dot(lk, lk, k);
    if (!(v > 0.0) || !std::isfinite(v)) return false;
    a(k, k) = std::sqrt(v);
    return true;
}

inline void cholesky_entry(Matrix& a, std::size_t i, std::size_t k) {
    a(i, k) = (a(i, k) - dot(a.row(i).data(), a.row(k).data(), k)) / a(k, k);
}

inline void zero_upper(Matrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) a(i, j) = 0.0;
}

ColumnMoments empty_moments(const Matrix& x) {
    return {std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0)};
}

// Below this much work an OpenMP region costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 14;

}  // namespace

namespace serial {

std::vector<double> distances_from(GeoPoint center, std::span<const GeoPoint> points) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = haversine_km(center, points[i]);
    return out;
}

Matrix gram_rows(const Matrix& z) {
    Matrix out(z.rows(), z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i) gram_row(z, out, i);
    mirror_lower(out);
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) multiply_row(a, b, out, i);
    return out;
}

ColumnMoments column_moments(const Matrix& x) {
    ColumnMoments m = empty_moments(x);
    if (x.rows() == 0) return m;
    for (std::size_t c = 0; c < x.cols(); ++c) moments_column(x, m, c);
    return m;
}

bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (!cholesky_diag(a, k)) return false;
        for (std::size_t i = k + 1; i < n; ++i) cholesky_entry(a, i, k);
    }
    zero_upper(a);
    return true;
}

}  // namespace serial

namespace parallel {

std::vector<double> distances_from(GeoPoint center, std::span<const GeoPoint> points) {
    std::vector<double> out(points.size());
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = haversine_km(center, points[static_cast<std::size_t>(i)]);
    return out;
}

Matrix gram_rows(const Matrix& z) {
    Matrix out(z.rows(), z.rows());
    const auto n = static_cast<std::ptrdiff_t>(z.rows());
    const bool big = z.rows() * z.rows() * z.cols() > kMinParallelWork;
#pragma omp parallel for schedule(dynamic, 8) if (big)
    for (std::ptrdiff_t i = 0; i < n; ++i) gram_row(z, out, static_cast<std::size_t>(i));
    mirror_lower(out);
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    const auto n = static_cast<std::ptrdiff_t>(a.rows());
    const bool big = a.rows() * a.cols() * b.cols() > kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t i = 0; i < n; ++i) multiply_row(a, b, out, static_cast<std::size_t>(i));
    return out;
}

ColumnMoments column_moments(const Matrix& x) {
    ColumnMoments m = empty_moments(x);
    if (x.rows() == 0) return m;
    const auto cols = static_cast<std::ptrdiff_t>(x.cols());
    const bool big = x.rows() * x.cols() > kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t c = 0; c < cols; ++c) moments_column(x, m, static_cast<std::size_t>(c));
    return m;
}

bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (!cholesky_diag(a, k)) return false;
        const auto first = static_cast<std::ptrdiff_t>(k + 1);
        const auto last = static_cast<std::ptrdiff_t>(n);
        const bool big = (n - k) * k > kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
        for (std::ptrdiff_t i = first; i < last; ++i) cholesky_entry(a, static_cast<std::size_t>(i), k);
    }
    zero_upper(a);
    return true;
}

}  // namespace parallel

}  // namespace typology::kernels
