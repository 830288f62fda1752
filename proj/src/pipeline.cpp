#include "typology/pipeline.hpp"

#include <exception>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "typology/vectorizer.hpp"

namespace typology {

namespace {

constexpr std::array<Partition, 3> kPartitions = {Partition::train, Partition::dev, Partition::test};

void say(const TrainLog& log, const std::string& msg) {
    if (!log.info) return;
#pragma omp critical(typology_log)
    log.info(msg);
}

PredictionSource ridge_source(System s) {
    return s == System::system1 ? PredictionSource::ridge_system1 : PredictionSource::ridge_system2;
}

}  // namespace

std::string_view system_name(System s) { return s == System::system1 ? "system1" : "system2"; }

std::optional<System> parse_system(std::string_view name) {
    if (name == "system1") return System::system1;
    if (name == "system2") return System::system2;
    return std::nullopt;
}

TrainConfig TrainConfig::for_system(System system, double alpha, double radius_km) {
    TrainConfig c;
    c.system = system;
    c.alpha = alpha;
    c.radius_km = radius_km;
    c.row_partitions = {Partition::train, Partition::dev};
    c.table_partitions = {Partition::train, Partition::dev};
    if (system == System::system2) c.table_partitions.insert(Partition::test);
    return c;
}

Dataset::Dataset(Corpus train, std::optional<Corpus> dev, std::optional<Corpus> test) {
    train.partition = Partition::train;
    corpora_[0] = std::make_unique<Corpus>(std::move(train));
    if (dev) {
        dev->partition = Partition::dev;
        corpora_[1] = std::make_unique<Corpus>(std::move(*dev));
    }
    if (test) {
        test->partition = Partition::test;
        corpora_[2] = std::make_unique<Corpus>(std::move(*test));
    }
    std::vector<const Corpus*> loaded;
    for (const auto& c : corpora_)
        if (c) loaded.push_back(c.get());
    vocab_ = std::make_shared<const Vocabulary>(Vocabulary::from_corpora(loaded));
    for (std::size_t i = 0; i < corpora_.size(); ++i)
        if (corpora_[i]) coded_[i] = encode(*vocab_, *corpora_[i]);
}

Dataset Dataset::load(const std::filesystem::path& train, const std::optional<std::filesystem::path>& dev,
                      const std::optional<std::filesystem::path>& test) {
    std::optional<Corpus> d, t;
    if (dev) d = load_corpus(*dev, Partition::dev);
    if (test) t = load_corpus(*test, Partition::test);
    return Dataset(load_corpus(train, Partition::train), std::move(d), std::move(t));
}

std::vector<CodedLanguage> Dataset::coded(const std::set<Partition>& partitions) const {
    std::vector<CodedLanguage> out;
    for (Partition p : kPartitions)
        if (partitions.contains(p)) {
            const auto& c = coded_[static_cast<std::size_t>(p)];
            out.insert(out.end(), c.begin(), c.end());
        }
    return out;
}

std::vector<const LanguageRecord*> Dataset::records(const std::set<Partition>& partitions) const {
    std::vector<const LanguageRecord*> out;
    for (Partition p : kPartitions)
        if (partitions.contains(p) && corpus(p) != nullptr)
            for (const auto& r : corpus(p)->records) out.push_back(&r);
    return out;
}

std::vector<const LanguageRecord*> Dataset::all_records() const {
    return records({Partition::train, Partition::dev, Partition::test});
}

AssociationTables build_tables_for(const Dataset& data, const std::set<Partition>& sources, double radius_km) {
    const auto observations = data.coded(sources);
    const auto centers = data.all_records();
    std::set<Partition> present;
    for (Partition p : sources)
        if (data.has(p)) present.insert(p);
    return build_tables(data.vocab(), observations, centers, radius_km, present);
}

ModelSet train_all(const Dataset& data, const TrainConfig& config, const AssociationTables& tables, int jobs,
                   const TrainLog& log) {
    const Vocabulary& vocab = *tables.vocab;
    const auto candidates = data.coded(config.row_partitions);
    const std::size_t n_features = vocab.feature_count();

    std::vector<std::optional<FeatureModel>> results(n_features);
    std::vector<std::exception_ptr> errors(n_features);
    const auto n = static_cast<std::ptrdiff_t>(n_features);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs < 1 ? 1 : jobs)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto f = static_cast<std::size_t>(i);
        const std::string& feature = vocab.feature_name(static_cast<FeatureId>(f));
        try {
            TrainingSet ts = build_training_set(feature, tables, candidates);
            std::vector<std::string> labels;
            labels.reserve(ts.labels.size());
            for (ValueId v : ts.labels) labels.push_back(vocab.value_name(static_cast<FeatureId>(f), v));
            RidgeEstimator est = fit(ts.rows, labels, config.alpha, config.weighting);
            est.target_feature = feature;
            est.schema = std::move(ts.schema);
            say(log, feature + ": " + std::to_string(labels.size()) + " rows, " + std::to_string(est.classes.size()) +
                         " classes, dimension " + std::to_string(est.schema.dimension()));
            results[f] = std::move(est);
        } catch (const DegenerateTarget&) {
            std::set<ValueId> values;
            for (const auto& c : candidates)
                if (c.values[f] != kNoValue) values.insert(c.values[f]);
            if (values.size() == 1) {
                results[f] = ConstantModel{vocab.value_name(static_cast<FeatureId>(f), *values.begin())};
                say(log, feature + ": single class, constant predictor");
            } else {
                say(log, feature + ": no training rows, skipped");
            }
        } catch (...) {
            errors[f] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ModelSet set;
    set.config = config;
    for (std::size_t f = 0; f < n_features; ++f) {
        const std::string& feature = vocab.feature_name(static_cast<FeatureId>(f));
        if (results[f]) set.models.emplace(feature, std::move(*results[f]));
        else set.skipped.push_back(feature);
    }
    return set;
}

RidgePredictor::RidgePredictor(const ModelSet& models, const AssociationTables& tables, const Baselines& fallback)
    : models_(models), tables_(tables), fallback_(fallback) {}

Prediction RidgePredictor::predict(const CodedLanguage& language, std::string_view feature) const {
    const auto it = models_.models.find(std::string(feature));
    if (it == models_.models.end()) return fallback_.predict_total(BaselineKind::b2, *language.record, feature);
    if (const auto* c = std::get_if<ConstantModel>(&it->second))
        return {language.record->wals_code, std::string(feature), FeatureValue{c->value, true},
                PredictionSource::constant};
    const auto& est = std::get<RidgeEstimator>(it->second);
    const LanguageVector v = vectorize(language, est.schema, tables_);
    return {language.record->wals_code, std::string(feature), FeatureValue{typology::predict(est, v).value, true},
            ridge_source(models_.config.system)};
}

std::vector<Prediction> predict_unknowns(const ModelSet& models, const Dataset& data,
                                         const AssociationTables& tables, int jobs) {
    if (data.test() == nullptr) throw ConfigError("prediction needs a test partition");
    const auto estimation = data.records(tables.sources);
    const Baselines baselines(tables, estimation);
    const RidgePredictor predictor(models, tables, baselines);
    const auto coded = data.coded({Partition::test});

    struct Slot {
        const CodedLanguage* language;
        const std::string* feature;
    };
    std::vector<Slot> slots;
    for (const auto& c : coded)
        for (const auto& [name, value] : c.record->features)
            if (!value.known) slots.push_back({&c, &name});

    std::vector<Prediction> out(slots.size());
    std::vector<std::exception_ptr> errors(slots.size());
    const auto n = static_cast<std::ptrdiff_t>(slots.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs < 1 ? 1 : jobs)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = predictor.predict(*slots[idx].language, *slots[idx].feature);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

LooResult ridge_heldout_eval(const Dataset& data, Partition estimation_rows, Partition eval_partition,
                             const TrainConfig& base, int jobs, const TrainLog& log) {
    const Corpus* eval = data.corpus(eval_partition);
    if (eval == nullptr || !data.has(estimation_rows)) throw ConfigError("held-out evaluation needs both partitions");
    std::unordered_set<std::string_view> row_codes;
    for (const LanguageRecord* r : data.records({estimation_rows})) row_codes.insert(r->wals_code);
    for (const auto& r : eval->records)
        if (row_codes.contains(r.wals_code))
            throw ContractError("language " + r.wals_code + " is both a training row and an evaluation language");

    TrainConfig config = base;
    config.row_partitions = {estimation_rows};
    config.table_partitions = {estimation_rows};
    const AssociationTables tables = build_tables_for(data, config.table_partitions, config.radius_km);
    const ModelSet models = train_all(data, config, tables, jobs, log);
    const auto estimation = data.records(config.table_partitions);
    const Baselines baselines(tables, estimation);
    const RidgePredictor predictor(models, tables, baselines);

    const auto coded = data.coded({eval_partition});
    std::unordered_map<const LanguageRecord*, const CodedLanguage*> by_record;
    for (const auto& c : coded) by_record.emplace(c.record, &c);
    omp_set_num_threads(jobs < 1 ? 1 : jobs);
    return loo_protocol(
        [&](const LanguageRecord& language, std::string_view feature) {
            return predictor.predict(*by_record.at(&language), feature);
        },
        *eval);
}

LooResult baseline_loo(const Dataset& data, BaselineKind kind, const std::set<Partition>& estimation,
                       Partition eval_partition, double radius_km) {
    const Corpus* eval = data.corpus(eval_partition);
    if (eval == nullptr) throw ConfigError("evaluation partition not loaded");
    const AssociationTables tables = build_tables_for(data, estimation, radius_km);
    const auto records = data.records(estimation);
    const Baselines baselines(tables, records);
    return loo_protocol(
        [&](const LanguageRecord& language, std::string_view feature) {
            return baselines.predict_total(kind, language, feature);
        },
        *eval);
}

void verify_schemas(const ModelSet& models, const Dataset& data, const AssociationTables& tables) {
    const auto candidates = data.coded(models.config.row_partitions);
    for (const auto& [feature, model] : models.models) {
        const auto* est = std::get_if<RidgeEstimator>(&model);
        if (est == nullptr) continue;
        if (!tables.vocab->feature_id(feature))
            throw Error("model for " + feature + " does not match the loaded data (feature missing)");
        VectorSchema rebuilt;
        try {
            rebuilt = build_schema(feature, tables, candidates);
        } catch (const DegenerateTarget&) {
            throw Error("model for " + feature + " does not match the loaded data (target is now degenerate)");
        }
        if (rebuilt.hash() != est->schema.hash())
            throw Error("schema hash mismatch for " + feature + ": the model store was trained on different data");
    }
}

std::map<std::string, double> feature_counts(const Dataset& data, const std::set<Partition>& partitions) {
    std::map<std::string, double> out;
    for (const LanguageRecord* r : data.records(partitions))
        for (const auto& [name, value] : r->features)
            if (value.known) out[name] += 1.0;
    return out;
}

std::map<std::string, double> feature_value_counts(const Dataset& data, const std::set<Partition>& partitions) {
    std::map<std::string, std::set<std::string_view>> values;
    for (const LanguageRecord* r : data.records(partitions))
        for (const auto& [name, value] : r->features)
            if (value.known) values[name].insert(value.raw);
    std::map<std::string, double> out;
    for (const auto& [name, vals] : values) out[name] = static_cast<double>(vals.size());
    return out;
}

}  // namespace typology
