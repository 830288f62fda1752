#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typology/corpus.hpp"

namespace typology {

using FeatureId = std::int32_t;
using ValueId = std::int32_t;
inline constexpr ValueId kNoValue = -1;

// Interned feature names and per-feature value strings, both sorted bytewise so
// that id order equals lexicographic order (all tie rules rely on this).
class Vocabulary {
public:
    Vocabulary() = default;
    static Vocabulary from_records(std::span<const LanguageRecord* const> records);
    static Vocabulary from_corpora(std::span<const Corpus* const> corpora);

    std::size_t feature_count() const { return features_.size(); }
    const std::vector<std::string>& features() const { return features_; }
    const std::string& feature_name(FeatureId f) const { return features_[static_cast<std::size_t>(f)]; }
    std::optional<FeatureId> feature_id(std::string_view name) const;

    std::size_t value_count(FeatureId f) const { return values_[static_cast<std::size_t>(f)].size(); }
    const std::vector<std::string>& values(FeatureId f) const { return values_[static_cast<std::size_t>(f)]; }
    const std::string& value_name(FeatureId f, ValueId v) const {
        return values_[static_cast<std::size_t>(f)][static_cast<std::size_t>(v)];
    }
    std::optional<ValueId> value_id(FeatureId f, std::string_view raw) const;

private:
    std::vector<std::string> features_;
    std::vector<std::vector<std::string>> values_;
};

// A language with its features encoded against a Vocabulary: values[f] is the
// ValueId of feature f, or kNoValue when absent or unknown.
struct CodedLanguage {
    const LanguageRecord* record = nullptr;
    Partition partition = Partition::train;
    std::vector<ValueId> values;
    std::vector<FeatureId> known;  // ascending feature ids with a known value
};

std::vector<CodedLanguage> encode(const Vocabulary& vocab, const Corpus& corpus);

}  // namespace typology
