#pragma once

// Data-parallel kernels. Each has a serial reference in kernels::serial and an
// OpenMP version in kernels::parallel. The OpenMP versions split work over
// output entries and keep the per-entry summation order of the serial code, so
// both produce bit-identical results for any thread count.

#include <span>
#include <vector>

#include "typology/geo.hpp"
#include "typology/linalg.hpp"

namespace typology::kernels {

struct ColumnMoments {
    std::vector<double> mean;
    std::vector<double> stddev;  // population; zero-variance columns report 0
};

namespace serial {
std::vector<double> distances_from(GeoPoint center, std::span<const GeoPoint> points);
Matrix gram_rows(const Matrix& z);                   // Z Z^T
Matrix multiply(const Matrix& a, const Matrix& b);   // A B
ColumnMoments column_moments(const Matrix& x);
bool cholesky(Matrix& a);                            // lower factor in place
}  // namespace serial

namespace parallel {
std::vector<double> distances_from(GeoPoint center, std::span<const GeoPoint> points);
Matrix gram_rows(const Matrix& z);
Matrix multiply(const Matrix& a, const Matrix& b);
ColumnMoments column_moments(const Matrix& x);
bool cholesky(Matrix& a);
}  // namespace parallel

using parallel::cholesky;
using parallel::column_moments;
using parallel::distances_from;
using parallel::gram_rows;
using parallel::multiply;

}  // namespace typology::kernels
