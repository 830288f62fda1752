#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typology/corpus.hpp"

namespace typology {

struct Tally {
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
    friend bool operator==(const Tally&, const Tally&) = default;
};

struct EvalReport {
    double micro_accuracy = 0.0;  // pooled correct / pooled total
    std::map<std::string, Tally> per_feature;
    std::map<std::string, Tally> per_family;
    std::size_t n_predictions = 0;
};

// Exact raw-string comparison against the gold corpus. Every prediction must have
// a known gold value.
EvalReport score(std::span<const Prediction> predictions, const Corpus& gold);

using LooPredictor = std::function<Prediction(const LanguageRecord& language, std::string_view feature)>;

struct LooResult {
    std::vector<Prediction> predictions;
    EvalReport report;
};

// Predicts every known value of every language in `eval` as if it were unknown.
// The predictor is responsible for not seeing the held-out value; queries run
// in parallel and must be thread-safe. Output order is independent of threads.
LooResult loo_protocol(const LooPredictor& predictor, const Corpus& eval);

struct Correlation {
    double r = 0.0;
    bool degenerate = false;  // one side had zero variance; r reported as 0
    std::size_t n = 0;
};

// Pearson r; throws ContractError for fewer than three points.
Correlation pearson(std::span<const double> x, std::span<const double> y);

// Pearson r between per-feature accuracy and `per_feature_quantity` (instance
// count, or number of distinct values), over features present in both.
Correlation accuracy_count_correlation(const EvalReport& report,
                                       const std::map<std::string, double>& per_feature_quantity);

struct FeatureDelta {
    std::string feature;
    double accuracy_system = 0.0;
    double accuracy_baseline = 0.0;
    double delta = 0.0;
    std::size_t total = 0;
};

struct DeltaLists {
    std::vector<FeatureDelta> wins;    // largest positive deltas first
    std::vector<FeatureDelta> losses;  // largest negative deltas first
};

DeltaLists diff_vs_baseline(const EvalReport& system, const EvalReport& baseline, std::size_t k);

std::string report_text(const EvalReport& report);
std::string report_json(const EvalReport& report);

// report.txt, report.json, and accuracy_vs_count.tsv (feature, count, accuracy).
void write_report(const EvalReport& report, const std::map<std::string, double>& counts,
                  const std::filesystem::path& dir);

}  // namespace typology
