#include "typology/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "typology/errors.hpp"

namespace typology {

namespace {

void finish(EvalReport& r) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const auto& [f, t] : r.per_feature) {
        correct += t.correct;
        total += t.total;
    }
    r.n_predictions = total;
    r.micro_accuracy = total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

}  // namespace

EvalReport score(std::span<const Prediction> predictions, const Corpus& gold) {
    std::unordered_map<std::string_view, const LanguageRecord*> by_code;
    for (const auto& r : gold.records) by_code.emplace(r.wals_code, &r);

    EvalReport report;
    for (const auto& p : predictions) {
        const auto it = by_code.find(p.language);
        const std::string* expected = it == by_code.end() ? nullptr : it->second->known_value(p.feature);
        if (expected == nullptr) throw ContractError("no gold value for " + p.language + "/" + p.feature);
        const bool ok = *expected == p.value.raw;
        Tally& tf = report.per_feature[p.feature];
        Tally& tl = report.per_family[it->second->family];
        ++tf.total;
        ++tl.total;
        if (ok) {
            ++tf.correct;
            ++tl.correct;
        }
    }
    finish(report);
    return report;
}

LooResult loo_protocol(const LooPredictor& predictor, const Corpus& eval) {
    struct Query {
        const LanguageRecord* language;
        const std::string* feature;
    };
    std::vector<Query> queries;
    for (const auto& r : eval.records)
        for (const auto& [name, value] : r.features)
            if (value.known) queries.push_back({&r, &name});

    LooResult result;
    result.predictions.resize(queries.size());
    std::vector<std::exception_ptr> errors(queries.size());
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            result.predictions[idx] = predictor(*queries[idx].language, *queries[idx].feature);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    result.report = score(result.predictions, eval);
    return result;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
    if (x.size() < 3) throw ContractError("pearson: at least three points required");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Correlation c;
    c.n = x.size();
    if (sxx == 0.0 || syy == 0.0) {
        c.degenerate = true;
        return c;
    }
    c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return c;
}

Correlation accuracy_count_correlation(const EvalReport& report,
                                       const std::map<std::string, double>& per_feature_quantity) {
    std::vector<double> acc, qty;
    for (const auto& [feature, tally] : report.per_feature) {
        const auto it = per_feature_quantity.find(feature);
        if (it == per_feature_quantity.end() || tally.total == 0) continue;
        acc.push_back(tally.accuracy());
        qty.push_back(it->second);
    }
    return pearson(acc, qty);
}

DeltaLists diff_vs_baseline(const EvalReport& system, const EvalReport& baseline, std::size_t k) {
    std::vector<FeatureDelta> deltas;
    for (const auto& [feature, tally] : system.per_feature) {
        const auto it = baseline.per_feature.find(feature);
        if (it == baseline.per_feature.end()) continue;
        const double a = tally.accuracy();
        const double b = it->second.accuracy();
        deltas.push_back({feature, a, b, a - b, tally.total});
    }
    std::stable_sort(deltas.begin(), deltas.end(),
                     [](const FeatureDelta& x, const FeatureDelta& y) { return x.delta > y.delta; });
    DeltaLists out;
    for (const auto& d : deltas) {
        if (out.wins.size() == k) break;
        if (d.delta > 0.0) out.wins.push_back(d);
    }
    for (auto it = deltas.rbegin(); it != deltas.rend(); ++it) {
        if (out.losses.size() == k) break;
        if (it->delta < 0.0) out.losses.push_back(*it);
    }
    return out;
}

std::string report_text(const EvalReport& report) {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "micro-averaged accuracy: %.4f (%zu predictions)\n", report.micro_accuracy,
                  report.n_predictions);
    out += buf;
    out += "\nper family:\n";
    for (const auto& [family, t] : report.per_family) {
        std::snprintf(buf, sizeof buf, "  %-40s %5zu / %-5zu %.4f\n", family.c_str(), t.correct, t.total, t.accuracy());
        out += buf;
    }
    out += "\nper feature:\n";
    for (const auto& [feature, t] : report.per_feature) {
        std::snprintf(buf, sizeof buf, "  %-70s %5zu / %-5zu %.4f\n", feature.c_str(), t.correct, t.total,
                      t.accuracy());
        out += buf;
    }
    return out;
}

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    j["micro_accuracy"] = report.micro_accuracy;
    j["n_predictions"] = report.n_predictions;
    auto tallies = [](const std::map<std::string, Tally>& m, const char* key) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [name, t] : m)
            arr.push_back({{key, name}, {"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}});
        return arr;
    };
    j["features"] = tallies(report.per_feature, "feature");
    j["families"] = tallies(report.per_family, "family");
    return j.dump(1) + "\n";
}

void write_report(const EvalReport& report, const std::map<std::string, double>& counts,
                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.txt", report_text(report));
    write_file(dir / "report.json", report_json(report));
    std::string scatter = "feature\tcount\taccuracy\n";
    char buf[64];
    for (const auto& [feature, t] : report.per_feature) {
        const auto it = counts.find(feature);
        if (it == counts.end()) continue;
        std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\n", it->second, t.accuracy());
        scatter += feature + buf;
    }
    write_file(dir / "accuracy_vs_count.tsv", scatter);
}

}  // namespace typology
