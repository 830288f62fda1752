#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "typology/associations.hpp"
#include "typology/baselines.hpp"
#include "typology/corpus.hpp"
#include "typology/eval.hpp"
#include "typology/ridge.hpp"
#include "typology/vocabulary.hpp"

namespace typology {

enum class System { system1, system2 };

std::string_view system_name(System s);
std::optional<System> parse_system(std::string_view name);

struct TrainConfig {
    System system = System::system1;
    double alpha = 1.0;
    double radius_km = 2500.0;
    ClassWeighting weighting = ClassWeighting::balanced;
    std::set<Partition> table_partitions;  // observations mined into association tables
    std::set<Partition> row_partitions;    // languages used as labelled training rows

    // system1: tables and rows from train+dev. system2: tables also from the
    // known values of the test partition; rows still train+dev.
    static TrainConfig for_system(System system, double alpha = 1.0, double radius_km = 2500.0);
};

// All loaded partitions with a shared vocabulary. Not copyable: the coded
// languages point into the corpora.
class Dataset {
public:
    Dataset(Corpus train, std::optional<Corpus> dev, std::optional<Corpus> test);
    Dataset(const Dataset&) = delete;
    Dataset& operator=(const Dataset&) = delete;
    Dataset(Dataset&&) = default;

    static Dataset load(const std::filesystem::path& train, const std::optional<std::filesystem::path>& dev,
                        const std::optional<std::filesystem::path>& test);

    const Corpus& train() const { return *corpora_[0]; }
    const Corpus* dev() const { return corpora_[1].get(); }
    const Corpus* test() const { return corpora_[2].get(); }
    const Corpus* corpus(Partition p) const { return corpora_[static_cast<std::size_t>(p)].get(); }
    bool has(Partition p) const { return corpus(p) != nullptr; }

    std::shared_ptr<const Vocabulary> vocab() const { return vocab_; }

    // Coded languages of the requested partitions, in train, dev, test order.
    std::vector<CodedLanguage> coded(const std::set<Partition>& partitions) const;
    std::vector<const LanguageRecord*> records(const std::set<Partition>& partitions) const;
    std::vector<const LanguageRecord*> all_records() const;

private:
    std::array<std::unique_ptr<Corpus>, 3> corpora_;
    std::shared_ptr<const Vocabulary> vocab_;
    std::array<std::vector<CodedLanguage>, 3> coded_;
};

// Tables mined from `sources`, with a neighbourhood entry for every loaded language.
AssociationTables build_tables_for(const Dataset& data, const std::set<Partition>& sources, double radius_km);

struct ConstantModel {
    std::string value;
};

using FeatureModel = std::variant<RidgeEstimator, ConstantModel>;

struct ModelSet {
    TrainConfig config;
    std::map<std::string, FeatureModel> models;  // by feature name
    std::vector<std::string> skipped;            // features without any training row
};

struct TrainLog {
    std::function<void(const std::string&)> info;
};

// One estimator per feature with at least two classes among the training rows;
// single-class features become constant predictors. Features are fitted in
// parallel (OpenMP, up to `jobs` workers); results do not depend on `jobs`.
ModelSet train_all(const Dataset& data, const TrainConfig& config, const AssociationTables& tables, int jobs = 1,
                   const TrainLog& log = {});

// Predicts a value for (language, feature) from the trained models, falling back
// to the clade baseline, then global majority, then the pipeline fallback.
class RidgePredictor {
public:
    RidgePredictor(const ModelSet& models, const AssociationTables& tables, const Baselines& fallback);

    Prediction predict(const CodedLanguage& language, std::string_view feature) const;

private:
    const ModelSet& models_;
    const AssociationTables& tables_;
    const Baselines& fallback_;
};

// One prediction per unknown slot of `test`.
std::vector<Prediction> predict_unknowns(const ModelSet& models, const Dataset& data,
                                         const AssociationTables& tables, int jobs = 1);

// Dev-set evaluation: tables and rows from train only, every known dev value
// predicted by the ridge models.
LooResult ridge_heldout_eval(const Dataset& data, Partition estimation_rows, Partition eval_partition,
                             const TrainConfig& config, int jobs = 1, const TrainLog& log = {});

// Leave-one-value-out accuracy of a baseline: estimates from `estimation`, every
// known value of `eval` predicted with its own contribution subtracted.
LooResult baseline_loo(const Dataset& data, BaselineKind kind, const std::set<Partition>& estimation,
                       Partition eval_partition, double radius_km);

// Recomputes the schema of every ridge model from `data` and throws Error if any
// hash differs from the stored one.
void verify_schemas(const ModelSet& models, const Dataset& data, const AssociationTables& tables);

// Number of training instances and distinct values per feature across `partitions`.
std::map<std::string, double> feature_counts(const Dataset& data, const std::set<Partition>& partitions);
std::map<std::string, double> feature_value_counts(const Dataset& data, const std::set<Partition>& partitions);

}  // namespace typology
