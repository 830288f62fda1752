#pragma once

#include <span>
#include <string>
#include <vector>

#include "typology/linalg.hpp"
#include "typology/vectorizer.hpp"

namespace typology {

enum class ClassWeighting { none, balanced };

// Which normal equations to factor. `automatic` picks the smaller system:
// primal (d x d) when d <= n, dual (n x n) otherwise.
enum class SolverPath { automatic, primal, dual };

struct RidgeSolution {
    Matrix coef;                    // d x k
    std::vector<double> intercept;  // k
};

// Weighted multi-output ridge regression with an unpenalized intercept:
//   minimize sum_i w_i |y_i - x_i B - c|^2 + alpha |B|^2.
RidgeSolution solve_ridge(const Matrix& x, const Matrix& y, std::span<const double> sample_weight,
                          double alpha, SolverPath path = SolverPath::automatic);

// N / (K * n_c) per sample under balanced weighting, 1 otherwise.
std::vector<double> class_weights(std::span<const std::size_t> label_index, std::size_t n_classes,
                                  ClassWeighting weighting);

struct RidgeEstimator {
    std::string target_feature;
    std::vector<std::string> classes;  // training frequency descending, then lexicographic
    Matrix weights;                    // dimension x classes
    std::vector<double> intercepts;
    double alpha = 1.0;
    VectorSchema schema;
};

struct ScoredPrediction {
    std::string value;
    std::size_t class_index = 0;
    std::vector<double> scores;
};

// One-vs-rest ridge classifier on 0/1 indicator targets.
RidgeEstimator fit(const Matrix& rows, std::span<const std::string> labels, double alpha,
                   ClassWeighting weighting, SolverPath path = SolverPath::automatic);

// Argmax of the class scores; ties go to the earlier class.
ScoredPrediction predict(const RidgeEstimator& estimator, std::span<const double> vector);
ScoredPrediction predict(const RidgeEstimator& estimator, const LanguageVector& vector);

}  // namespace typology
