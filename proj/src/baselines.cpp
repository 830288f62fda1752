#include "typology/baselines.hpp"

#include <array>

namespace typology {

namespace {

std::optional<ValueId> majority_value(const Histogram& h) {
    const auto m = majority(h);
    if (!m) return std::nullopt;
    return m->value;
}

}  // namespace

std::string_view baseline_name(BaselineKind k) {
    switch (k) {
        case BaselineKind::b1: return "b1";
        case BaselineKind::b2: return "b2";
        case BaselineKind::b3: return "b3";
        case BaselineKind::b4: return "b4";
        case BaselineKind::b5: return "b5";
    }
    return "?";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
    for (BaselineKind k : {BaselineKind::b1, BaselineKind::b2, BaselineKind::b3, BaselineKind::b4, BaselineKind::b5})
        if (baseline_name(k) == name) return k;
    return std::nullopt;
}

Baselines::Baselines(const AssociationTables& tables, std::span<const LanguageRecord* const> estimation)
    : tables_(tables), with_feature_(tables.vocab->feature_count()) {
    const Vocabulary& vocab = *tables.vocab;
    for (const LanguageRecord* r : estimation) {
        by_code_.emplace(r->wals_code, r);
        for (const auto& [name, value] : r->features) {
            if (!value.known) continue;
            if (const auto f = vocab.feature_id(name)) with_feature_[static_cast<std::size_t>(*f)].push_back(r);
        }
    }
}

Baselines::Masked Baselines::resolve(const LanguageRecord& language, std::string_view feature) const {
    const Vocabulary& vocab = *tables_.vocab;
    const auto f = vocab.feature_id(feature);
    if (!f) throw NoEstimate("feature " + std::string(feature) + " is not in the vocabulary");
    Masked m{*f, kNoValue};
    if (const auto it = by_code_.find(language.wals_code); it != by_code_.end()) {
        if (const std::string* own = it->second->known_value(feature)) {
            if (const auto v = vocab.value_id(*f, *own)) m.held_out = *v;
        }
    }
    return m;
}

std::optional<ValueId> Baselines::group_majority(GroupKind kind, std::string_view key, const Masked& m) const {
    const Histogram* h = tables_.group(kind, key, m.feature);
    if (h == nullptr) return std::nullopt;
    if (m.held_out != kNoValue && kind != GroupKind::area && h->counts[static_cast<std::size_t>(m.held_out)] > 0)
        return majority_value(h->without(m.held_out));
    return majority_value(*h);
}

std::optional<ValueId> Baselines::global_majority(const Masked& m) const {
    const Histogram& h = tables_.global[static_cast<std::size_t>(m.feature)];
    if (m.held_out != kNoValue && h.counts[static_cast<std::size_t>(m.held_out)] > 0)
        return majority_value(h.without(m.held_out));
    return majority_value(h);
}

std::optional<NearestHit> Baselines::nearest(const LanguageRecord& language, const Masked& m,
                                             std::string_view genus, std::string_view family) const {
    const auto& pool = with_feature_[static_cast<std::size_t>(m.feature)];
    if (genus.empty() && family.empty())
        return nearest_with_feature(language, pool, tables_.vocab->feature_name(m.feature));
    std::vector<const LanguageRecord*> subset;
    for (const LanguageRecord* r : pool) {
        if (!genus.empty() && r->genus == genus) subset.push_back(r);
        else if (!family.empty() && r->family == family) subset.push_back(r);
    }
    return nearest_with_feature(language, subset, tables_.vocab->feature_name(m.feature));
}

Prediction Baselines::make(const LanguageRecord& language, FeatureId f, ValueId v, PredictionSource s) const {
    return {language.wals_code, tables_.vocab->feature_name(f), FeatureValue{tables_.vocab->value_name(f, v), true}, s};
}

Prediction Baselines::b1_global_majority(const LanguageRecord& language, std::string_view feature) const {
    const Masked m = resolve(language, feature);
    const auto v = global_majority(m);
    if (!v) throw NoEstimate("no observation of " + std::string(feature));
    return make(language, m.feature, *v, PredictionSource::b1);
}

Prediction Baselines::b2_clade_majority(const LanguageRecord& language, std::string_view feature) const {
    const Masked m = resolve(language, feature);
    if (const auto v = group_majority(GroupKind::genus, language.genus, m))
        return make(language, m.feature, *v, PredictionSource::b2);
    if (const auto v = group_majority(GroupKind::family, language.family, m))
        return make(language, m.feature, *v, PredictionSource::b2);
    Prediction p = b1_global_majority(language, feature);
    p.source = PredictionSource::b2;
    return p;
}

Prediction Baselines::b3_nearest_language(const LanguageRecord& language, std::string_view feature) const {
    const Masked m = resolve(language, feature);
    const auto hit = nearest(language, m, {}, {});
    if (!hit) throw NoEstimate("no other language has " + std::string(feature));
    return {language.wals_code, std::string(feature), FeatureValue{*hit->language->known_value(feature), true},
            PredictionSource::b3};
}

Prediction Baselines::b4_clade_nearest(const LanguageRecord& language, std::string_view feature) const {
    const Masked m = resolve(language, feature);
    std::optional<NearestHit> hit;
    if (!language.genus.empty()) hit = nearest(language, m, language.genus, {});
    if (!hit && !language.family.empty()) hit = nearest(language, m, {}, language.family);
    if (!hit) hit = nearest(language, m, {}, {});
    if (!hit) throw NoEstimate("no other language has " + std::string(feature));
    return {language.wals_code, std::string(feature), FeatureValue{*hit->language->known_value(feature), true},
            PredictionSource::b4};
}

Prediction Baselines::b5_ensemble_vote(const LanguageRecord& language, std::string_view feature) const {
    const Masked m = resolve(language, feature);
    const Vocabulary& vocab = *tables_.vocab;

    std::array<std::optional<ValueId>, 3> votes;
    votes[0] = group_majority(GroupKind::area, language.wals_code, m);
    if (!votes[0]) {
        if (const auto hit = nearest(language, m, {}, {}))
            votes[0] = vocab.value_id(m.feature, *hit->language->known_value(feature));
    }
    votes[1] = group_majority(GroupKind::genus, language.genus, m);
    votes[2] = group_majority(GroupKind::family, language.family, m);

    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (!votes[i]) continue;
        for (std::size_t j = i + 1; j < votes.size(); ++j)
            if (votes[j] && *votes[j] == *votes[i]) return make(language, m.feature, *votes[i], PredictionSource::b5);
    }
    Prediction p = b1_global_majority(language, feature);
    p.source = PredictionSource::b5;
    return p;
}

Prediction Baselines::predict(BaselineKind kind, const LanguageRecord& language, std::string_view feature) const {
    switch (kind) {
        case BaselineKind::b1: return b1_global_majority(language, feature);
        case BaselineKind::b2: return b2_clade_majority(language, feature);
        case BaselineKind::b3: return b3_nearest_language(language, feature);
        case BaselineKind::b4: return b4_clade_nearest(language, feature);
        case BaselineKind::b5: break;
    }
    return b5_ensemble_vote(language, feature);
}

Prediction Baselines::fallback(const LanguageRecord& language, std::string_view feature) const {
    const Vocabulary& vocab = *tables_.vocab;
    Prediction p{language.wals_code, std::string(feature), FeatureValue::from_raw(std::string(kUnknownMarker)),
                 PredictionSource::fallback};
    if (const auto f = vocab.feature_id(feature); f && vocab.value_count(*f) > 0)
        p.value = FeatureValue{vocab.values(*f).front(), true};
    return p;
}

Prediction Baselines::predict_total(BaselineKind kind, const LanguageRecord& language, std::string_view feature) const {
    try {
        return predict(kind, language, feature);
    } catch (const NoEstimate&) {
        return fallback(language, feature);
    }
}

}  // namespace typology
