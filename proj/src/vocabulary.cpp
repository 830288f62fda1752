#include "typology/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "typology/errors.hpp"

namespace typology {

Vocabulary Vocabulary::from_records(std::span<const LanguageRecord* const> records) {
    std::map<std::string, std::set<std::string>> seen;
    for (const LanguageRecord* r : records) {
        for (const auto& [name, value] : r->features) {
            auto& vals = seen[name];
            if (value.known) vals.insert(value.raw);
        }
    }
    Vocabulary v;
    v.features_.reserve(seen.size());
    v.values_.reserve(seen.size());
    for (auto& [name, vals] : seen) {
        v.features_.push_back(name);
        v.values_.emplace_back(vals.begin(), vals.end());
    }
    return v;
}

Vocabulary Vocabulary::from_corpora(std::span<const Corpus* const> corpora) {
    std::vector<const LanguageRecord*> records;
    for (const Corpus* c : corpora)
        for (const auto& r : c->records) records.push_back(&r);
    return from_records(records);
}

std::optional<FeatureId> Vocabulary::feature_id(std::string_view name) const {
    const auto it = std::lower_bound(features_.begin(), features_.end(), name);
    if (it == features_.end() || *it != name) return std::nullopt;
    return static_cast<FeatureId>(it - features_.begin());
}

std::optional<ValueId> Vocabulary::value_id(FeatureId f, std::string_view raw) const {
    const auto& vals = values_[static_cast<std::size_t>(f)];
    const auto it = std::lower_bound(vals.begin(), vals.end(), raw);
    if (it == vals.end() || *it != raw) return std::nullopt;
    return static_cast<ValueId>(it - vals.begin());
}

std::vector<CodedLanguage> encode(const Vocabulary& vocab, const Corpus& corpus) {
    std::vector<CodedLanguage> out;
    out.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
        CodedLanguage c;
        c.record = &r;
        c.partition = corpus.partition;
        c.values.assign(vocab.feature_count(), kNoValue);
        for (const auto& [name, value] : r.features) {
            if (!value.known) continue;
            const auto f = vocab.feature_id(name);
            const auto v = f ? vocab.value_id(*f, value.raw) : std::nullopt;
            if (!v)
                throw ContractError("value " + name + "=" + value.raw + " of " + r.wals_code +
                                    " is missing from the vocabulary");
            c.values[static_cast<std::size_t>(*f)] = *v;
        }
        for (std::size_t f = 0; f < c.values.size(); ++f)
            if (c.values[f] != kNoValue) c.known.push_back(static_cast<FeatureId>(f));
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace typology
