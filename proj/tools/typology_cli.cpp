// typology: command-line front end for the feature prediction pipeline.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "typology/associations.hpp"
#include "typology/baselines.hpp"
#include "typology/corpus.hpp"
#include "typology/errors.hpp"
#include "typology/eval.hpp"
#include "typology/geo.hpp"
#include "typology/model_store.hpp"
#include "typology/pipeline.hpp"
#include "typology/vectorizer.hpp"

namespace fs = std::filesystem;
using namespace typology;

namespace {

struct Options {
    std::string train;
    std::string dev;
    std::string test;
    int jobs = 0;
    long seed = 0;  // accepted for interface stability; nothing is random
    double alpha = 1.0;
    double radius_km = kDefaultRadiusKm;
    bool verbose = false;
};

int effective_jobs(const Options& o) { return o.jobs > 0 ? o.jobs : omp_get_max_threads(); }

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

Dataset load_data(const Options& o) {
    if (o.train.empty()) throw ConfigError("--train is required");
    return Dataset::load(o.train, opt_path(o.dev), opt_path(o.test));
}

TrainLog make_log(const Options& o) {
    TrainLog log;
    if (o.verbose) log.info = [](const std::string& m) { std::cerr << m << '\n'; };
    return log;
}

std::set<Partition> parse_partitions(const std::string& list) {
    std::set<Partition> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t end = std::min(list.find(',', start), list.size());
        const std::string name = list.substr(start, end - start);
        const auto p = parse_partition(name);
        if (!p) throw ConfigError("unknown partition '" + name + "'");
        out.insert(*p);
        start = end + 1;
    }
    return out;
}

std::string partitions_label(const std::set<Partition>& ps) {
    std::string s;
    for (Partition p : ps) s += (s.empty() ? "" : "+") + std::string(partition_name(p));
    return s;
}

void require(const Dataset& data, const std::set<Partition>& ps) {
    for (Partition p : ps)
        if (!data.has(p)) throw ConfigError("partition " + std::string(partition_name(p)) + " is not loaded");
}

void print_sizes(const std::string& label, const TableSizes& s) {
    std::printf("%-16s genus %zu  family %zu  area %zu  implications %zu\n", label.c_str(), s.genus, s.family, s.area,
                s.implications);
}

void print_report(const std::string& title, const EvalReport& r) {
    std::printf("%s: micro accuracy %.4f over %zu predictions\n", title.c_str(), r.micro_accuracy, r.n_predictions);
}

// Predictions read back from a submission: the values it puts in the unknown slots of `blinded`.
std::vector<Prediction> submitted_values(const Corpus& blinded, const Corpus& submission) {
    std::vector<Prediction> out;
    for (const auto& rec : blinded.records) {
        const LanguageRecord* sub = submission.find(rec.wals_code);
        if (sub == nullptr) throw ValidationError("submission lacks language " + rec.wals_code);
        for (const auto& [name, value] : rec.features) {
            if (value.known) continue;
            const FeatureValue* v = sub->find(name);
            if (v == nullptr || !v->known)
                throw CompletenessError("submission leaves " + rec.wals_code + "/" + name + " unfilled");
            out.push_back({rec.wals_code, name, *v, PredictionSource::fallback});
        }
    }
    return out;
}

void report_correlations(const EvalReport& report, const Dataset& data, const std::set<Partition>& counted) {
    const auto counts = feature_counts(data, counted);
    const auto values = feature_value_counts(data, counted);
    for (const auto& [label, quantity] : {std::pair{"instance count", &counts}, std::pair{"number of values", &values}}) {
        if (report.per_feature.size() < 3) {
            std::printf("correlation with %s: too few features\n", label);
            continue;
        }
        const Correlation c = accuracy_count_correlation(report, *quantity);
        std::printf("correlation with %s: r = %.4f (n = %zu%s)\n", label, c.r, c.n, c.degenerate ? ", degenerate" : "");
    }
}

int cmd_stats(const Options& o) {
    const Dataset data = load_data(o);
    for (Partition p : {Partition::train, Partition::dev, Partition::test}) {
        const Corpus* c = data.corpus(p);
        if (c == nullptr) continue;
        const StatsSummary s = corpus_stats(*c);
        std::printf("%-5s languages %zu  families %zu  genera %zu  features %zu  values %zu  observed %zu  unknown %zu\n",
                    std::string(partition_name(p)).c_str(), s.languages, s.families, s.genera, s.feature_types,
                    s.feature_values, s.observed_values, s.unknown_slots);
    }
    return 0;
}

int cmd_build_assoc(const Options& o, const std::string& sources, const std::string& out, bool all_configs) {
    const Dataset data = load_data(o);
    if (all_configs) {
        std::vector<std::set<Partition>> configs = {{Partition::train}};
        if (data.has(Partition::dev)) configs.push_back({Partition::train, Partition::dev});
        if (data.has(Partition::dev) && data.has(Partition::test))
            configs.push_back({Partition::train, Partition::dev, Partition::test});
        for (const auto& c : configs) print_sizes(partitions_label(c), build_tables_for(data, c, o.radius_km).sizes());
        return 0;
    }
    const auto ps = parse_partitions(sources);
    require(data, ps);
    const AssociationTables tables = build_tables_for(data, ps, o.radius_km);
    print_sizes(partitions_label(ps), tables.sizes());
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + out);
        write_tables(tables, f);
        if (!f) throw Error("failed writing " + out);
    }
    return 0;
}

int cmd_baseline(const Options& o, const std::string& which, const std::string& split, const std::string& gold,
                 const std::string& out) {
    const auto kind = parse_baseline(which);
    if (!kind) throw ConfigError("unknown baseline '" + which + "' (expected b1..b5)");
    const Dataset data = load_data(o);
    EvalReport report;
    if (split == "dev") {
        if (!data.has(Partition::dev)) throw ConfigError("--dev is required for the dev split");
        report = baseline_loo(data, *kind, {Partition::train, Partition::dev}, Partition::dev, o.radius_km).report;
    } else {
        if (!data.has(Partition::test) || gold.empty()) throw ConfigError("the test split needs --test and --gold");
        std::set<Partition> est = {Partition::train, Partition::test};
        if (data.has(Partition::dev)) est.insert(Partition::dev);
        const AssociationTables tables = build_tables_for(data, est, o.radius_km);
        const auto records = data.records(est);
        const Baselines baselines(tables, records);
        std::vector<Prediction> preds;
        for (const auto& rec : data.test()->records)
            for (const auto& [name, value] : rec.features)
                if (!value.known) preds.push_back(baselines.predict_total(*kind, rec, name));
        report = score(preds, load_corpus(gold, Partition::test));
    }
    print_report(which + " on " + split, report);
    if (!out.empty()) write_report(report, feature_counts(data, {Partition::train, Partition::dev}), out);
    return 0;
}

int cmd_train(const Options& o, const std::string& system_name_arg, const std::string& out) {
    const auto system = parse_system(system_name_arg);
    if (!system) throw ConfigError("unknown system '" + system_name_arg + "'");
    if (o.dev.empty()) throw ConfigError("--dev is required for training");
    if (*system == System::system2 && o.test.empty()) throw ConfigError("system2 needs --test");
    const Dataset data = load_data(o);
    const TrainConfig config = TrainConfig::for_system(*system, o.alpha, o.radius_km);
    const AssociationTables tables = build_tables_for(data, config.table_partitions, config.radius_km);
    const ModelSet models = train_all(data, config, tables, effective_jobs(o), make_log(o));
    save_models(models, out);
    std::printf("trained %zu models (%zu skipped) into %s\n", models.models.size(), models.skipped.size(),
                out.c_str());
    return 0;
}

int cmd_predict(const Options& o, const std::string& model_dir, const std::string& out) {
    if (o.test.empty()) throw ConfigError("--test is required for prediction");
    const ModelSet models = load_models(model_dir);
    const Dataset data = load_data(o);
    require(data, models.config.table_partitions);
    require(data, models.config.row_partitions);
    const AssociationTables tables =
        build_tables_for(data, models.config.table_partitions, models.config.radius_km);
    verify_schemas(models, data, tables);
    const auto preds = predict_unknowns(models, data, tables, effective_jobs(o));
    write_predictions(*data.test(), preds, out);
    const StatsSummary check = corpus_stats(load_corpus(out, Partition::test));
    if (check.unknown_slots != 0)
        throw CompletenessError(out + " still has " + std::to_string(check.unknown_slots) + " unknown slots");
    std::printf("wrote %zu predictions to %s\n", preds.size(), out.c_str());
    return 0;
}

int cmd_evaluate(const Options& o, const std::string& predictions, const std::string& gold, const std::string& out,
                 const std::string& baseline_predictions, std::size_t top_k) {
    if (o.test.empty()) throw ConfigError("--test (the blinded file) is required for evaluation");
    const Dataset data = load_data(o);
    const Corpus gold_corpus = load_corpus(gold, Partition::test);
    const auto system = submitted_values(*data.test(), load_corpus(predictions, Partition::test));
    const EvalReport report = score(system, gold_corpus);
    print_report("submission", report);
    std::set<Partition> counted = {Partition::train};
    if (data.has(Partition::dev)) counted.insert(Partition::dev);
    report_correlations(report, data, counted);
    if (!out.empty()) write_report(report, feature_counts(data, counted), out);
    if (!baseline_predictions.empty()) {
        const auto base = submitted_values(*data.test(), load_corpus(baseline_predictions, Partition::test));
        const DeltaLists d = diff_vs_baseline(report, score(base, gold_corpus), top_k);
        for (const auto& [title, list] : {std::pair{"gains", &d.wins}, std::pair{"losses", &d.losses}}) {
            std::printf("%s vs baseline:\n", title);
            for (const auto& f : *list)
                std::printf("  %+.3f  %s (%.3f vs %.3f, n=%zu)\n", f.delta, f.feature.c_str(), f.accuracy_system,
                            f.accuracy_baseline, f.total);
        }
    }
    return 0;
}

int cmd_ridge_eval(const Options& o, const std::string& out) {
    if (o.dev.empty()) throw ConfigError("--dev is required");
    const Dataset data = load_data(o);
    TrainConfig config = TrainConfig::for_system(System::system1, o.alpha, o.radius_km);
    const auto t0 = std::chrono::steady_clock::now();
    const LooResult r = ridge_heldout_eval(data, Partition::train, Partition::dev, config, effective_jobs(o),
                                           make_log(o));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_report("ridge (train rows) on dev", r.report);
    std::printf("elapsed %.1f s with %d job(s)\n", secs, effective_jobs(o));
    if (!out.empty()) write_report(r.report, feature_counts(data, {Partition::train}), out);
    return 0;
}

// Dimension accounting for one target feature: columns per block, and what the
// alternative reading (implication one-hots over the conditioning feature's
// values) would give.
int cmd_schema(const Options& o, const std::string& feature, const std::string& rows) {
    const Dataset data = load_data(o);
    const auto ps = parse_partitions(rows);
    require(data, ps);
    const AssociationTables tables = build_tables_for(data, ps, o.radius_km);
    const auto coded = data.coded(ps);
    const TrainingSet ts = build_training_set(feature, tables, coded);
    const VectorSchema& s = ts.schema;
    const Vocabulary& vocab = *tables.vocab;
    std::size_t group_hot = 0, impl_hot = 0, alternative_hot = 0;
    for (const auto& slot : s.slots) {
        if (slot.kind == SlotKind::implication) {
            impl_hot += slot.vocab.size();
            alternative_hot += vocab.value_count(*vocab.feature_id(slot.cond_feature)) + 1;
        } else {
            group_hot += slot.vocab.size();
        }
    }
    const std::size_t numeric = s.numeric_columns.size();
    std::printf("target %s: %zu training rows, %zu classes\n", feature.c_str(), ts.labels.size(),
                std::set<ValueId>(ts.labels.begin(), ts.labels.end()).size());
    std::printf("dimension %zu = numeric %zu + group one-hot %zu + implication one-hot %zu\n", s.dimension(), numeric,
                group_hot, impl_hot);
    std::printf("implication slots %zu, target values %zu (+1 null per slot)\n", s.slots.size() - 3,
                vocab.value_count(*vocab.feature_id(feature)));
    std::printf("one-hot over conditioning values instead: dimension %zu\n", numeric + group_hot + alternative_hot);
    return 0;
}

int cmd_export_map(const Options& o, const std::string& out) {
    const Dataset data = load_data(o);
    std::vector<Corpus> corpora;
    for (Partition p : {Partition::train, Partition::dev, Partition::test})
        if (const Corpus* c = data.corpus(p)) corpora.push_back(*c);
    export_map(corpora, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typological feature prediction: association tables, baselines, ridge models."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");

    Options o;
    app.add_option("--train", o.train, "Training partition file")->check(CLI::ExistingFile);
    app.add_option("--dev", o.dev, "Development partition file")->check(CLI::ExistingFile);
    app.add_option("--test", o.test, "Blinded test partition file")->check(CLI::ExistingFile);
    app.add_option("-j,--jobs", o.jobs, "Worker threads (0 = all cores); results do not depend on it")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", o.seed, "Accepted for interface stability; the pipeline is deterministic");
    app.add_option("--alpha", o.alpha, "Ridge penalty")->check(CLI::PositiveNumber);
    app.add_option("--radius", o.radius_km, "Area neighbourhood radius in km")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", o.verbose, "Per-feature training log on stderr");

    auto* stats = app.add_subcommand("stats", "Corpus summary per loaded partition");

    std::string sources = "train,dev", assoc_out;
    bool all_configs = false;
    auto* assoc = app.add_subcommand("build-assoc", "Build association tables and report their sizes");
    assoc->add_option("--sources", sources, "Comma-separated partitions mined for observations");
    assoc->add_option("-o,--out", assoc_out, "Write the tables to this file");
    assoc->add_flag("--all-configs", all_configs, "Report sizes for train, train+dev, train+dev+test");

    std::string which, split = "dev", gold, baseline_out;
    auto* baseline = app.add_subcommand("baseline", "Evaluate a baseline (b1..b5)");
    baseline->add_option("--system", which, "b1, b2, b3, b4 or b5")->required();
    baseline->add_option("--split", split, "dev (leave-one-value-out) or test (scored against --gold)")
        ->check(CLI::IsMember({"dev", "test"}));
    baseline->add_option("--gold", gold, "Gold test file")->check(CLI::ExistingFile);
    baseline->add_option("-o,--out", baseline_out, "Report directory");

    std::string system = "system1", train_out;
    auto* train = app.add_subcommand("train", "Fit one ridge model per feature");
    train->add_option("--system", system, "system1 or system2")->check(CLI::IsMember({"system1", "system2"}));
    train->add_option("-o,--out", train_out, "Model store directory")->required();

    std::string model_dir, predict_out;
    auto* predict = app.add_subcommand("predict", "Fill every unknown slot of the test file");
    predict->add_option("-m,--models", model_dir, "Model store directory")->required()->check(CLI::ExistingDirectory);
    predict->add_option("-o,--out", predict_out, "Submission file")->required();

    std::string predictions, eval_gold, eval_out, baseline_predictions;
    std::size_t top_k = 10;
    auto* evaluate = app.add_subcommand("evaluate", "Score a submission against the gold file");
    evaluate->add_option("-p,--predictions", predictions, "Submission file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--gold", eval_gold, "Gold test file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("-o,--out", eval_out, "Report directory");
    evaluate->add_option("--baseline-predictions", baseline_predictions, "Second submission to diff against")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--top", top_k, "Features listed per direction in the diff");

    std::string ridge_out;
    auto* ridge_eval = app.add_subcommand("ridge-eval", "Train on train rows only and score every dev value");
    ridge_eval->add_option("-o,--out", ridge_out, "Report directory");

    std::string schema_feature, schema_rows = "train,dev";
    auto* schema = app.add_subcommand("schema", "Vector dimension accounting for one target feature");
    schema->add_option("--feature", schema_feature, "Target feature")->required();
    schema->add_option("--rows", schema_rows, "Partitions used for tables and training rows");

    std::string map_out;
    auto* map = app.add_subcommand("export-map", "GeoJSON of language locations by partition");
    map->add_option("-o,--out", map_out, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        omp_set_num_threads(effective_jobs(o));
        if (*stats) return cmd_stats(o);
        if (*assoc) return cmd_build_assoc(o, sources, assoc_out, all_configs);
        if (*baseline) return cmd_baseline(o, which, split, gold, baseline_out);
        if (*train) return cmd_train(o, system, train_out);
        if (*predict) return cmd_predict(o, model_dir, predict_out);
        if (*evaluate) return cmd_evaluate(o, predictions, eval_gold, eval_out, baseline_predictions, top_k);
        if (*ridge_eval) return cmd_ridge_eval(o, ridge_out);
        if (*schema) return cmd_schema(o, schema_feature, schema_rows);
        if (*map) return cmd_export_map(o, map_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::data);
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return static_cast<int>(ExitCode::numeric);
    }
    return static_cast<int>(ExitCode::usage);
}
