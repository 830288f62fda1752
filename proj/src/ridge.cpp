#include "typology/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "typology/errors.hpp"
#include "typology/kernels.hpp"

namespace typology {

RidgeSolution solve_ridge(const Matrix& x, const Matrix& y, std::span<const double> sample_weight,
                          double alpha, SolverPath path) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const std::size_t k = y.cols();
    if (y.rows() != n || sample_weight.size() != n) throw ContractError("solve_ridge: row count mismatch");
    if (n == 0) throw ContractError("solve_ridge: no samples");
    if (!(alpha >= 0.0)) throw ContractError("solve_ridge: alpha must be non-negative");

    double wsum = 0.0;
    for (double w : sample_weight) {
        if (!(w > 0.0)) throw ContractError("solve_ridge: sample weights must be positive");
        wsum += w;
    }
    std::vector<double> xmean(d, 0.0), ymean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sample_weight[i];
        for (std::size_t j = 0; j < d; ++j) xmean[j] += w * x(i, j);
        for (std::size_t c = 0; c < k; ++c) ymean[c] += w * y(i, c);
    }
    for (double& v : xmean) v /= wsum;
    for (double& v : ymean) v /= wsum;

    // Centered rows scaled by sqrt(w): the weighted problem becomes ordinary ridge.
    Matrix z(n, d), t(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sqrt(sample_weight[i]);
        for (std::size_t j = 0; j < d; ++j) z(i, j) = s * (x(i, j) - xmean[j]);
        for (std::size_t c = 0; c < k; ++c) t(i, c) = s * (y(i, c) - ymean[c]);
    }
    const Matrix zt = z.transposed();

    if (path == SolverPath::automatic) path = d <= n ? SolverPath::primal : SolverPath::dual;
    RidgeSolution sol;
    if (path == SolverPath::primal) {
        Matrix gram = kernels::gram_rows(zt);
        for (std::size_t j = 0; j < d; ++j) gram(j, j) += alpha;
        sol.coef = solve_spd(std::move(gram), kernels::multiply(zt, t));
    } else {
        if (!(alpha > 0.0)) throw ContractError("solve_ridge: dual path needs alpha > 0");
        Matrix gram = kernels::gram_rows(z);
        for (std::size_t i = 0; i < n; ++i) gram(i, i) += alpha;
        const Matrix dual = solve_spd(std::move(gram), t);
        sol.coef = kernels::multiply(zt, dual);
    }

    sol.intercept = ymean;
    for (std::size_t j = 0; j < d; ++j) {
        const double m = xmean[j];
        if (m == 0.0) continue;
        for (std::size_t c = 0; c < k; ++c) sol.intercept[c] -= m * sol.coef(j, c);
    }
    for (double v : sol.coef.data())
        if (!std::isfinite(v)) throw NumericError("ridge solution is not finite");
    return sol;
}

std::vector<double> class_weights(std::span<const std::size_t> label_index, std::size_t n_classes,
                                  ClassWeighting weighting) {
    std::vector<double> w(label_index.size(), 1.0);
    if (weighting == ClassWeighting::none) return w;
    std::vector<std::size_t> count(n_classes, 0);
    for (std::size_t c : label_index) ++count.at(c);
    const double n = static_cast<double>(label_index.size());
    const double classes = static_cast<double>(n_classes);
    for (std::size_t i = 0; i < label_index.size(); ++i)
        w[i] = n / (classes * static_cast<double>(count[label_index[i]]));
    return w;
}

RidgeEstimator fit(const Matrix& rows, std::span<const std::string> labels, double alpha,
                   ClassWeighting weighting, SolverPath path) {
    if (labels.size() != rows.rows()) throw ContractError("fit: one label per row required");
    if (!(alpha > 0.0)) throw ContractError("fit: alpha must be positive");

    std::map<std::string, std::size_t> freq;
    for (const auto& l : labels) ++freq[l];
    if (freq.size() < 2) throw ContractError("fit: at least two distinct labels required");

    RidgeEstimator est;
    est.alpha = alpha;
    for (const auto& [label, count] : freq) est.classes.push_back(label);
    std::stable_sort(est.classes.begin(), est.classes.end(),
                     [&](const std::string& a, const std::string& b) { return freq[a] > freq[b]; });
    std::map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < est.classes.size(); ++c) index[est.classes[c]] = c;

    const std::size_t k = est.classes.size();
    std::vector<std::size_t> label_index;
    label_index.reserve(labels.size());
    Matrix y(rows.rows(), k, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        label_index.push_back(index[labels[i]]);
        y(i, label_index.back()) = 1.0;
    }
    const auto weights = class_weights(label_index, k, weighting);
    RidgeSolution sol = solve_ridge(rows, y, weights, alpha, path);
    est.weights = std::move(sol.coef);
    est.intercepts = std::move(sol.intercept);
    return est;
}

ScoredPrediction predict(const RidgeEstimator& estimator, std::span<const double> vector) {
    if (vector.size() != estimator.weights.rows())
        throw ContractError("predict: vector has dimension " + std::to_string(vector.size()) + ", estimator expects " +
                            std::to_string(estimator.weights.rows()));
    ScoredPrediction p;
    p.scores = estimator.intercepts;
    const std::size_t k = p.scores.size();
    for (std::size_t j = 0; j < vector.size(); ++j) {
        const double v = vector[j];
        if (v == 0.0) continue;
        const auto w = estimator.weights.row(j);
        for (std::size_t c = 0; c < k; ++c) p.scores[c] += v * w[c];
    }
    p.class_index = static_cast<std::size_t>(std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin());
    p.value = estimator.classes[p.class_index];
    return p;
}

ScoredPrediction predict(const RidgeEstimator& estimator, const LanguageVector& vector) {
    return predict(estimator, std::span<const double>(vector.values));
}

}  // namespace typology
