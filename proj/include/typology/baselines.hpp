#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typology/associations.hpp"
#include "typology/corpus.hpp"
#include "typology/errors.hpp"
#include "typology/geo.hpp"

namespace typology {

enum class BaselineKind { b1, b2, b3, b4, b5 };

std::string_view baseline_name(BaselineKind k);
std::optional<BaselineKind> parse_baseline(std::string_view name);

// The estimation data has no observation of the requested feature.
class NoEstimate : public Error {
public:
    using Error::Error;
};

// Deterministic predictors over association tables and the languages they were
// estimated from. When the queried language is itself one of the estimation
// languages, its own value of the queried feature is subtracted from every
// count the predictor consults, so querying a known value behaves as if that
// value had been held out.
class Baselines {
public:
    Baselines(const AssociationTables& tables, std::span<const LanguageRecord* const> estimation);

    Prediction b1_global_majority(const LanguageRecord& language, std::string_view feature) const;
    Prediction b2_clade_majority(const LanguageRecord& language, std::string_view feature) const;
    Prediction b3_nearest_language(const LanguageRecord& language, std::string_view feature) const;
    Prediction b4_clade_nearest(const LanguageRecord& language, std::string_view feature) const;
    Prediction b5_ensemble_vote(const LanguageRecord& language, std::string_view feature) const;

    Prediction predict(BaselineKind kind, const LanguageRecord& language, std::string_view feature) const;

    // Lexicographically first value of the feature across the vocabulary, or "?"
    // if it was never observed anywhere. Used when no estimate exists.
    Prediction fallback(const LanguageRecord& language, std::string_view feature) const;

    // predict(), with NoEstimate replaced by fallback().
    Prediction predict_total(BaselineKind kind, const LanguageRecord& language, std::string_view feature) const;

private:
    struct Masked {
        FeatureId feature = 0;
        ValueId held_out = kNoValue;  // the query language's own value, if it is an estimation language
    };

    Masked resolve(const LanguageRecord& language, std::string_view feature) const;
    std::optional<ValueId> group_majority(GroupKind kind, std::string_view key, const Masked& m) const;
    std::optional<ValueId> global_majority(const Masked& m) const;
    std::optional<NearestHit> nearest(const LanguageRecord& language, const Masked& m,
                                      std::string_view genus, std::string_view family) const;
    Prediction make(const LanguageRecord& language, FeatureId f, ValueId v, PredictionSource s) const;

    const AssociationTables& tables_;
    std::unordered_map<std::string_view, const LanguageRecord*> by_code_;
    std::vector<std::vector<const LanguageRecord*>> with_feature_;  // by FeatureId
};

}  // namespace typology
