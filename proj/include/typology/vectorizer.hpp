#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typology/associations.hpp"
#include "typology/errors.hpp"
#include "typology/linalg.hpp"
#include "typology/vocabulary.hpp"

namespace typology {

// Stand-in probability for absent associations; must survive a log transform.
inline constexpr double kMissingProbability = 1e-6;

enum class SlotKind { genus, family, area, implication };

std::string_view slot_kind_name(SlotKind k);

// One categorical block of the language vector. Every value it can hold is a
// value of the target feature; vocab[0] is the null value (empty string).
struct CategoricalSlot {
    SlotKind kind = SlotKind::genus;
    std::string cond_feature;  // implication slots only
    std::vector<std::string> vocab;

    std::size_t numeric_width() const { return kind == SlotKind::implication ? 4 : 2; }
    friend bool operator==(const CategoricalSlot&, const CategoricalSlot&) = default;
};

// Column layout of the vectors for one target feature:
//   latitude, longitude,
//   then per slot: one-hot(vocab) followed by its numeric columns
//     genus/family/area: log prior, count
//     implication:       log cond prob, cond count, log implied prior, target count
struct VectorSchema {
    std::string target_feature;
    std::vector<std::string> feature_order;
    std::vector<CategoricalSlot> slots;
    std::vector<std::string> numeric_columns;
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t one_hot_width() const;
    std::size_t dimension() const { return one_hot_width() + numeric_columns.size(); }
    std::vector<std::string> column_names() const;
    std::uint64_t hash() const;

    friend bool operator==(const VectorSchema&, const VectorSchema&) = default;
};

struct LanguageVector {
    std::string language;
    std::vector<double> values;
};

// Unscaled vector contents: target ValueIds per slot (kNoValue = null) and numeric
// columns with probabilities already in the log domain.
struct RawVector {
    std::vector<ValueId> categorical;
    std::vector<double> numeric;
};

class DegenerateTarget : public Error {
public:
    using Error::Error;
};

struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;  // zero-variance columns get 1
};

// Column means and population standard deviations of the rows of `numeric`.
Scaler fit_scaler(const Matrix& numeric);

// Raw vector of `language` for `target`, read from the association tables.
RawVector raw_vector(const CodedLanguage& language, FeatureId target, const AssociationTables& tables);

struct TrainingSet {
    VectorSchema schema;
    Matrix rows;                  // one encoded vector per training language
    std::vector<ValueId> labels;  // target value of each row
    std::vector<const CodedLanguage*> languages;
};

// Builds the schema from the languages in `candidates` that have `target` known
// and encodes them. Throws DegenerateTarget if fewer than two classes occur.
TrainingSet build_training_set(std::string_view target, const AssociationTables& tables,
                               std::span<const CodedLanguage> candidates);

VectorSchema build_schema(std::string_view target, const AssociationTables& tables,
                          std::span<const CodedLanguage> training_rows);

// Encodes raw vectors with the schema's vocabularies and scaler. Values unseen in
// training map to the null column.
Matrix encode_rows(const VectorSchema& schema, const Vocabulary& vocab, std::span<const RawVector> raws);

LanguageVector vectorize(const CodedLanguage& language, const VectorSchema& schema,
                         const AssociationTables& tables);
LanguageVector vectorize(const LanguageRecord& language, const VectorSchema& schema,
                         const AssociationTables& tables);

// (column name, value) pairs for debugging.
std::vector<std::pair<std::string, double>> describe(const LanguageVector& v, const VectorSchema& schema);

}  // namespace typology
