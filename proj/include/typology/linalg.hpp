#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace typology {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    static Matrix identity(std::size_t n);
    Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Solves A X = B for symmetric positive definite A (Cholesky). Falls back to
// LU with partial pivoting when the factorization breaks down; throws
// NumericError if A is singular.
Matrix solve_spd(Matrix a, const Matrix& b);

// LU with partial pivoting; throws NumericError on an exactly singular pivot.
Matrix solve_lu(Matrix a, Matrix b);

// In-place forward/back substitution with a lower-triangular Cholesky factor.
void cholesky_solve_inplace(const Matrix& lower, Matrix& b);

}  // namespace typology
