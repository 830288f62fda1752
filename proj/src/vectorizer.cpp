#include "typology/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "typology/kernels.hpp"

namespace typology {

namespace {

const double kLogMissing = std::log(kMissingProbability);

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ULL;
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    }
    void str(std::string_view s) {
        const std::uint64_t n = s.size();
        bytes(&n, sizeof n);
        bytes(s.data(), s.size());
    }
    void num(double d) { bytes(&d, sizeof d); }
};

void push_group(RawVector& raw, const Histogram* h) {
    const auto m = h ? majority(*h) : std::nullopt;
    if (!m) {
        raw.categorical.push_back(kNoValue);
        raw.numeric.push_back(kLogMissing);
        raw.numeric.push_back(0.0);
        return;
    }
    raw.categorical.push_back(m->value);
    raw.numeric.push_back(std::log(m->prior));
    raw.numeric.push_back(static_cast<double>(m->total));
}

// For each slot, a map from target ValueId to one-hot offset (0 = null).
std::vector<std::vector<std::size_t>> slot_positions(const VectorSchema& schema, const Vocabulary& vocab,
                                                     FeatureId target) {
    const auto& values = vocab.values(target);
    std::vector<std::vector<std::size_t>> pos(schema.slots.size(), std::vector<std::size_t>(values.size(), 0));
    for (std::size_t s = 0; s < schema.slots.size(); ++s) {
        const auto& slot_vocab = schema.slots[s].vocab;
        for (std::size_t v = 0; v < values.size(); ++v) {
            const auto it = std::lower_bound(slot_vocab.begin() + 1, slot_vocab.end(), values[v]);
            if (it != slot_vocab.end() && *it == values[v])
                pos[s][v] = static_cast<std::size_t>(it - slot_vocab.begin());
        }
    }
    return pos;
}

FeatureId require_feature(const Vocabulary& vocab, std::string_view name) {
    const auto f = vocab.feature_id(name);
    if (!f) throw ContractError("unknown feature " + std::string(name));
    return *f;
}

}  // namespace

std::string_view slot_kind_name(SlotKind k) {
    switch (k) {
        case SlotKind::genus: return "genus";
        case SlotKind::family: return "family";
        case SlotKind::area: return "area";
        case SlotKind::implication: return "implication";
    }
    return "?";
}

std::size_t VectorSchema::one_hot_width() const {
    std::size_t w = 0;
    for (const auto& s : slots) w += s.vocab.size();
    return w;
}

std::vector<std::string> VectorSchema::column_names() const {
    std::vector<std::string> names;
    names.reserve(dimension());
    names.push_back(numeric_columns.at(0));
    names.push_back(numeric_columns.at(1));
    std::size_t numeric = 2;
    for (const auto& s : slots) {
        const std::string prefix = s.kind == SlotKind::implication ? "impl[" + s.cond_feature + "]"
                                                                   : std::string(slot_kind_name(s.kind));
        for (const auto& v : s.vocab) names.push_back(prefix + ".value=" + (v.empty() ? "<null>" : v));
        for (std::size_t k = 0; k < s.numeric_width(); ++k) names.push_back(numeric_columns.at(numeric++));
    }
    return names;
}

std::uint64_t VectorSchema::hash() const {
    Fnv1a h;
    h.str(target_feature);
    for (const auto& f : feature_order) h.str(f);
    for (const auto& s : slots) {
        h.str(slot_kind_name(s.kind));
        h.str(s.cond_feature);
        for (const auto& v : s.vocab) h.str(v);
    }
    for (const auto& c : numeric_columns) h.str(c);
    for (double m : mean) h.num(m);
    for (double sd : stddev) h.num(sd);
    return h.h;
}

Scaler fit_scaler(const Matrix& numeric) {
    if (numeric.rows() == 0) throw ContractError("fit_scaler needs at least one vector");
    auto m = kernels::column_moments(numeric);
    for (double& s : m.stddev)
        if (!(s > 0.0)) s = 1.0;
    return {std::move(m.mean), std::move(m.stddev)};
}

RawVector raw_vector(const CodedLanguage& language, FeatureId target, const AssociationTables& tables) {
    const LanguageRecord& rec = *language.record;
    if (!tables.area_centers.contains(rec.wals_code))
        throw ContractError("language " + rec.wals_code + " has no neighbourhood in the area table");
    const Vocabulary& vocab = *tables.vocab;
    const std::size_t n_features = vocab.feature_count();
    const Histogram& global = tables.global[static_cast<std::size_t>(target)];

    RawVector raw;
    raw.categorical.reserve(n_features + 2);
    raw.numeric.reserve(2 + 6 + 4 * n_features);
    raw.numeric.push_back(rec.latitude);
    raw.numeric.push_back(rec.longitude);
    push_group(raw, tables.group(GroupKind::genus, rec.genus, target));
    push_group(raw, tables.group(GroupKind::family, rec.family, target));
    push_group(raw, tables.group(GroupKind::area, rec.wals_code, target));

    for (std::size_t fi = 0; fi < n_features; ++fi) {
        if (static_cast<FeatureId>(fi) == target) continue;
        const ValueId vi = language.values[fi];
        const Histogram* h = vi == kNoValue ? nullptr : tables.implication(static_cast<FeatureId>(fi), vi, target);
        const auto m = h ? majority(*h) : std::nullopt;
        if (!m) {
            raw.categorical.push_back(kNoValue);
            raw.numeric.insert(raw.numeric.end(), {kLogMissing, 0.0, kLogMissing, 0.0});
            continue;
        }
        const double prior = static_cast<double>(global.counts[static_cast<std::size_t>(m->value)]) /
                             static_cast<double>(global.total);
        raw.categorical.push_back(m->value);
        raw.numeric.insert(raw.numeric.end(), {std::log(m->prior), static_cast<double>(m->total),
                                               std::log(prior), static_cast<double>(global.total)});
    }
    return raw;
}

Matrix encode_rows(const VectorSchema& schema, const Vocabulary& vocab, std::span<const RawVector> raws) {
    const FeatureId target = require_feature(vocab, schema.target_feature);
    const auto positions = slot_positions(schema, vocab, target);
    const std::size_t dim = schema.dimension();
    Matrix out(raws.size(), dim);
    for (std::size_t r = 0; r < raws.size(); ++r) {
        const RawVector& raw = raws[r];
        if (raw.categorical.size() != schema.slots.size() || raw.numeric.size() != schema.numeric_columns.size())
            throw ContractError("raw vector does not conform to the schema of " + schema.target_feature);
        auto row = out.row(r);
        std::size_t col = 0;
        std::size_t num = 0;
        auto put_numeric = [&] {
            row[col++] = (raw.numeric[num] - schema.mean[num]) / schema.stddev[num];
            ++num;
        };
        put_numeric();
        put_numeric();
        for (std::size_t s = 0; s < schema.slots.size(); ++s) {
            const ValueId v = raw.categorical[s];
            const std::size_t hot = v == kNoValue ? 0 : positions[s][static_cast<std::size_t>(v)];
            row[col + hot] = 1.0;
            col += schema.slots[s].vocab.size();
            for (std::size_t k = 0; k < schema.slots[s].numeric_width(); ++k) put_numeric();
        }
    }
    return out;
}

TrainingSet build_training_set(std::string_view target_name, const AssociationTables& tables,
                               std::span<const CodedLanguage> candidates) {
    const Vocabulary& vocab = *tables.vocab;
    const FeatureId target = require_feature(vocab, target_name);

    TrainingSet ts;
    std::vector<RawVector> raws;
    std::set<ValueId> classes;
    for (const auto& lang : candidates) {
        const ValueId label = lang.values[static_cast<std::size_t>(target)];
        if (label == kNoValue) continue;
        ts.languages.push_back(&lang);
        ts.labels.push_back(label);
        classes.insert(label);
        raws.push_back(raw_vector(lang, target, tables));
    }
    if (classes.size() < 2)
        throw DegenerateTarget("feature " + std::string(target_name) + " has " + std::to_string(classes.size()) +
                               " distinct value(s) among training rows");

    VectorSchema& schema = ts.schema;
    schema.target_feature = std::string(target_name);
    schema.feature_order = vocab.features();
    schema.numeric_columns = {"latitude", "longitude"};
    for (SlotKind k : {SlotKind::genus, SlotKind::family, SlotKind::area}) {
        schema.slots.push_back({k, "", {""}});
        const std::string name(slot_kind_name(k));
        schema.numeric_columns.push_back(name + ".log_prior");
        schema.numeric_columns.push_back(name + ".count");
    }
    for (std::size_t fi = 0; fi < vocab.feature_count(); ++fi) {
        if (static_cast<FeatureId>(fi) == target) continue;
        const std::string& cond = vocab.feature_name(static_cast<FeatureId>(fi));
        schema.slots.push_back({SlotKind::implication, cond, {""}});
        const std::string prefix = "impl[" + cond + "]";
        for (const char* suffix : {".log_cond_prob", ".cond_count", ".log_implied_prior", ".target_count"})
            schema.numeric_columns.push_back(prefix + suffix);
    }

    std::vector<std::set<ValueId>> seen(schema.slots.size());
    Matrix numeric(raws.size(), schema.numeric_columns.size());
    for (std::size_t r = 0; r < raws.size(); ++r) {
        for (std::size_t s = 0; s < raws[r].categorical.size(); ++s)
            if (raws[r].categorical[s] != kNoValue) seen[s].insert(raws[r].categorical[s]);
        std::copy(raws[r].numeric.begin(), raws[r].numeric.end(), numeric.row(r).begin());
    }
    for (std::size_t s = 0; s < schema.slots.size(); ++s)
        for (ValueId v : seen[s]) schema.slots[s].vocab.push_back(vocab.value_name(target, v));

    Scaler scaler = fit_scaler(numeric);
    schema.mean = std::move(scaler.mean);
    schema.stddev = std::move(scaler.stddev);

    ts.rows = encode_rows(schema, vocab, raws);
    return ts;
}

VectorSchema build_schema(std::string_view target, const AssociationTables& tables,
                          std::span<const CodedLanguage> training_rows) {
    return build_training_set(target, tables, training_rows).schema;
}

LanguageVector vectorize(const CodedLanguage& language, const VectorSchema& schema,
                         const AssociationTables& tables) {
    const FeatureId target = require_feature(*tables.vocab, schema.target_feature);
    const RawVector raw = raw_vector(language, target, tables);
    Matrix m = encode_rows(schema, *tables.vocab, std::span<const RawVector>(&raw, 1));
    return {language.record->wals_code, std::move(m.data())};
}

LanguageVector vectorize(const LanguageRecord& language, const VectorSchema& schema,
                         const AssociationTables& tables) {
    const Vocabulary& vocab = *tables.vocab;
    CodedLanguage coded;
    coded.record = &language;
    coded.values.assign(vocab.feature_count(), kNoValue);
    for (const auto& [name, value] : language.features) {
        if (!value.known) continue;
        const auto f = vocab.feature_id(name);
        const auto v = f ? vocab.value_id(*f, value.raw) : std::nullopt;
        if (v) coded.values[static_cast<std::size_t>(*f)] = *v;
    }
    for (std::size_t f = 0; f < coded.values.size(); ++f)
        if (coded.values[f] != kNoValue) coded.known.push_back(static_cast<FeatureId>(f));
    return vectorize(coded, schema, tables);
}

std::vector<std::pair<std::string, double>> describe(const LanguageVector& v, const VectorSchema& schema) {
    const auto names = schema.column_names();
    if (names.size() != v.values.size()) throw ContractError("vector does not conform to schema");
    std::vector<std::pair<std::string, double>> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) out.emplace_back(names[i], v.values[i]);
    return out;
}

}  // namespace typology
