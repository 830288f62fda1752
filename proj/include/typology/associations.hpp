#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typology/corpus.hpp"
#include "typology/vocabulary.hpp"

namespace typology {

enum class GroupKind { genus, family, area };

std::string_view group_kind_name(GroupKind k);

// Value counts of one feature within one group (or condition).
struct Histogram {
    std::vector<int> counts;
    int total = 0;

    explicit Histogram(std::size_t values = 0) : counts(values, 0) {}
    void add(ValueId v, int n = 1) {
        counts[static_cast<std::size_t>(v)] += n;
        total += n;
    }
    // Copy with one observation of `v` removed (used to mask a held-out value).
    Histogram without(ValueId v) const;
    // Relative frequencies; empty when total is 0.
    std::vector<double> distribution() const;

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct Majority {
    ValueId value = kNoValue;
    int count = 0;
    int total = 0;
    double prior = 0.0;
};

// Argmax of the histogram, ties to the smallest ValueId (= lexicographically
// smallest raw value). nullopt when the histogram is empty.
std::optional<Majority> majority(const Histogram& h);

struct GroupAssociation {
    GroupKind group_kind = GroupKind::genus;
    std::string group_key;
    std::string feature;
    int total_count = 0;
    FeatureValue majority_value;
    double majority_prior = 0.0;
};

struct ImplicationAssociation {
    std::string cond_feature;
    FeatureValue cond_value;
    std::string target_feature;
    FeatureValue implied_value;
    double cond_prob = 0.0;
    int cond_count = 0;
    double implied_prior = 0.0;
    int target_count = 0;
};

struct GroupKey {
    std::string group;
    FeatureId feature = 0;
    friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

struct GroupKeyLess {
    using is_transparent = void;
    bool operator()(const GroupKey& a, const GroupKey& b) const {
        return std::pair<std::string_view, FeatureId>(a.group, a.feature) <
               std::pair<std::string_view, FeatureId>(b.group, b.feature);
    }
    bool operator()(const GroupKey& a, const std::pair<std::string_view, FeatureId>& b) const {
        return std::pair<std::string_view, FeatureId>(a.group, a.feature) < b;
    }
    bool operator()(const std::pair<std::string_view, FeatureId>& a, const GroupKey& b) const {
        return a < std::pair<std::string_view, FeatureId>(b.group, b.feature);
    }
};

struct ImplicationKey {
    FeatureId cond_feature = 0;
    ValueId cond_value = 0;
    FeatureId target_feature = 0;
    friend auto operator<=>(const ImplicationKey&, const ImplicationKey&) = default;
};

using GroupTable = std::map<GroupKey, Histogram, GroupKeyLess>;
using ImplicationTable = std::map<ImplicationKey, Histogram>;

struct TableSizes {
    std::size_t genus = 0;
    std::size_t family = 0;
    std::size_t area = 0;
    std::size_t implications = 0;
    friend bool operator==(const TableSizes&, const TableSizes&) = default;
};

// The four association tables plus per-feature global counts. Only entries with
// at least one observation are stored.
struct AssociationTables {
    std::shared_ptr<const Vocabulary> vocab;
    std::set<Partition> sources;
    double radius_km = 0.0;
    GroupTable genus;
    GroupTable family;
    GroupTable area;
    ImplicationTable implications;
    std::vector<Histogram> global;        // indexed by FeatureId
    std::set<std::string, std::less<>> area_centers;

    const GroupTable& table(GroupKind k) const;
    const Histogram* group(GroupKind kind, std::string_view key, FeatureId f) const;
    const Histogram* implication(FeatureId cond_feature, ValueId cond_value, FeatureId target) const;

    std::optional<GroupAssociation> group_association(GroupKind kind, std::string_view key,
                                                      std::string_view feature) const;
    std::optional<ImplicationAssociation> implication_association(std::string_view cond_feature,
                                                                  std::string_view cond_value,
                                                                  std::string_view target) const;
    TableSizes sizes() const;
};

TableSizes table_sizes(const AssociationTables& tables);

// Genus or family histograms. Records with an empty group string contribute nothing.
GroupTable build_group_table(std::span<const CodedLanguage> observations, GroupKind kind,
                             const Vocabulary& vocab);

// Per-center neighbourhood histograms: every observation within radius_km of the
// center (inclusive), the center itself excluded.
GroupTable build_area_table(std::span<const CodedLanguage> observations,
                            std::span<const LanguageRecord* const> centers, double radius_km,
                            const Vocabulary& vocab);

// Histograms of the target feature's values conditioned on (cond_feature, cond_value),
// over languages where both are known.
ImplicationTable build_implications(std::span<const CodedLanguage> observations,
                                    const Vocabulary& vocab);

std::vector<Histogram> build_global(std::span<const CodedLanguage> observations,
                                    const Vocabulary& vocab);

AssociationTables build_tables(std::shared_ptr<const Vocabulary> vocab,
                               std::span<const CodedLanguage> observations,
                               std::span<const LanguageRecord* const> centers, double radius_km,
                               std::set<Partition> sources);

// Line-oriented tab-separated dump; read_tables restores it exactly.
void write_tables(const AssociationTables& tables, std::ostream& out);
AssociationTables read_tables(std::istream& in, std::shared_ptr<const Vocabulary> vocab);

}  // namespace typology
