#include "typology/associations.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "typology/errors.hpp"
#include "typology/geo.hpp"

namespace typology {

namespace {

std::string format_prob(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int to_int(const std::string& s, std::size_t line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("expected integer, got '" + s + "'", line_no);
    return v;
}

}  // namespace

std::string_view group_kind_name(GroupKind k) {
    switch (k) {
        case GroupKind::genus: return "genus";
        case GroupKind::family: return "family";
        case GroupKind::area: return "area";
    }
    return "?";
}

Histogram Histogram::without(ValueId v) const {
    Histogram h = *this;
    auto& c = h.counts[static_cast<std::size_t>(v)];
    if (c == 0) throw ContractError("masking a value that was never counted");
    --c;
    --h.total;
    return h;
}

std::vector<double> Histogram::distribution() const {
    std::vector<double> p;
    if (total == 0) return p;
    p.reserve(counts.size());
    for (int c : counts) p.push_back(static_cast<double>(c) / static_cast<double>(total));
    return p;
}

std::optional<Majority> majority(const Histogram& h) {
    if (h.total <= 0) return std::nullopt;
    Majority m;
    m.total = h.total;
    for (std::size_t v = 0; v < h.counts.size(); ++v) {
        if (h.counts[v] > m.count) {
            m.count = h.counts[v];
            m.value = static_cast<ValueId>(v);
        }
    }
    m.prior = static_cast<double>(m.count) / static_cast<double>(m.total);
    return m;
}

const GroupTable& AssociationTables::table(GroupKind k) const {
    switch (k) {
        case GroupKind::genus: return genus;
        case GroupKind::family: return family;
        case GroupKind::area: break;
    }
    return area;
}

const Histogram* AssociationTables::group(GroupKind kind, std::string_view key, FeatureId f) const {
    if (key.empty()) return nullptr;
    const GroupTable& t = table(kind);
    const auto it = t.find(std::pair<std::string_view, FeatureId>(key, f));
    return it == t.end() ? nullptr : &it->second;
}

const Histogram* AssociationTables::implication(FeatureId cond_feature, ValueId cond_value,
                                                FeatureId target) const {
    const auto it = implications.find({cond_feature, cond_value, target});
    return it == implications.end() ? nullptr : &it->second;
}

std::optional<GroupAssociation> AssociationTables::group_association(GroupKind kind,
                                                                     std::string_view key,
                                                                     std::string_view feature) const {
    const auto f = vocab->feature_id(feature);
    if (!f) return std::nullopt;
    const Histogram* h = group(kind, key, *f);
    if (h == nullptr) return std::nullopt;
    const auto m = majority(*h);
    if (!m) return std::nullopt;
    return GroupAssociation{kind, std::string(key), std::string(feature), m->total,
                            FeatureValue{vocab->value_name(*f, m->value), true}, m->prior};
}

std::optional<ImplicationAssociation> AssociationTables::implication_association(
    std::string_view cond_feature, std::string_view cond_value, std::string_view target) const {
    const auto fi = vocab->feature_id(cond_feature);
    const auto fj = vocab->feature_id(target);
    if (!fi || !fj) return std::nullopt;
    const auto vi = vocab->value_id(*fi, cond_value);
    if (!vi) return std::nullopt;
    const Histogram* h = implication(*fi, *vi, *fj);
    if (h == nullptr) return std::nullopt;
    const auto m = majority(*h);
    if (!m) return std::nullopt;
    const Histogram& g = global[static_cast<std::size_t>(*fj)];
    ImplicationAssociation a;
    a.cond_feature = std::string(cond_feature);
    a.cond_value = FeatureValue{std::string(cond_value), true};
    a.target_feature = std::string(target);
    a.implied_value = FeatureValue{vocab->value_name(*fj, m->value), true};
    a.cond_prob = m->prior;
    a.cond_count = m->total;
    a.target_count = g.total;
    a.implied_prior = g.total > 0 ? static_cast<double>(g.counts[static_cast<std::size_t>(m->value)]) /
                                        static_cast<double>(g.total)
                                  : 0.0;
    return a;
}

TableSizes AssociationTables::sizes() const {
    return {genus.size(), family.size(), area.size(), implications.size()};
}

TableSizes table_sizes(const AssociationTables& tables) { return tables.sizes(); }

GroupTable build_group_table(std::span<const CodedLanguage> observations, GroupKind kind,
                             const Vocabulary& vocab) {
    if (kind == GroupKind::area) throw ContractError("area tables need centers and a radius");
    GroupTable table;
    for (const auto& lang : observations) {
        const std::string& key = kind == GroupKind::genus ? lang.record->genus : lang.record->family;
        if (key.empty()) continue;
        for (FeatureId f : lang.known) {
            auto [it, inserted] = table.try_emplace(GroupKey{key, f}, vocab.value_count(f));
            it->second.add(lang.values[static_cast<std::size_t>(f)]);
        }
    }
    return table;
}

GroupTable build_area_table(std::span<const CodedLanguage> observations,
                            std::span<const LanguageRecord* const> centers, double radius_km,
                            const Vocabulary& vocab) {
    if (!(radius_km > 0.0)) throw ContractError("radius must be positive");
    std::vector<GeoPoint> points;
    points.reserve(observations.size());
    for (const auto& o : observations) points.push_back(location(*o.record));

    const std::size_t n_features = vocab.feature_count();
    std::vector<std::vector<Histogram>> per_center(centers.size());
    const auto n_centers = static_cast<std::ptrdiff_t>(centers.size());

#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t ci = 0; ci < n_centers; ++ci) {
        const LanguageRecord& center = *centers[static_cast<std::size_t>(ci)];
        const GeoPoint c = location(center);
        auto& hist = per_center[static_cast<std::size_t>(ci)];
        for (std::size_t f = 0; f < n_features; ++f)
            hist.emplace_back(vocab.value_count(static_cast<FeatureId>(f)));
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const auto& o = observations[i];
            if (o.record->wals_code == center.wals_code) continue;
            if (haversine_km(c, points[i]) > radius_km) continue;
            for (FeatureId f : o.known) hist[static_cast<std::size_t>(f)].add(o.values[static_cast<std::size_t>(f)]);
        }
    }

    GroupTable table;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        for (std::size_t f = 0; f < n_features; ++f) {
            auto& h = per_center[ci][f];
            if (h.total == 0) continue;
            table.emplace(GroupKey{centers[ci]->wals_code, static_cast<FeatureId>(f)}, std::move(h));
        }
    }
    return table;
}

ImplicationTable build_implications(std::span<const CodedLanguage> observations,
                                    const Vocabulary& vocab) {
    ImplicationTable table;
    for (const auto& lang : observations) {
        for (FeatureId fi : lang.known) {
            const ValueId vi = lang.values[static_cast<std::size_t>(fi)];
            for (FeatureId fj : lang.known) {
                if (fj == fi) continue;
                auto [it, inserted] = table.try_emplace(ImplicationKey{fi, vi, fj}, vocab.value_count(fj));
                it->second.add(lang.values[static_cast<std::size_t>(fj)]);
            }
        }
    }
    return table;
}

std::vector<Histogram> build_global(std::span<const CodedLanguage> observations,
                                    const Vocabulary& vocab) {
    std::vector<Histogram> global;
    global.reserve(vocab.feature_count());
    for (std::size_t f = 0; f < vocab.feature_count(); ++f)
        global.emplace_back(vocab.value_count(static_cast<FeatureId>(f)));
    for (const auto& lang : observations)
        for (FeatureId f : lang.known)
            global[static_cast<std::size_t>(f)].add(lang.values[static_cast<std::size_t>(f)]);
    return global;
}

AssociationTables build_tables(std::shared_ptr<const Vocabulary> vocab,
                               std::span<const CodedLanguage> observations,
                               std::span<const LanguageRecord* const> centers, double radius_km,
                               std::set<Partition> sources) {
    AssociationTables t;
    t.sources = std::move(sources);
    t.radius_km = radius_km;
    t.genus = build_group_table(observations, GroupKind::genus, *vocab);
    t.family = build_group_table(observations, GroupKind::family, *vocab);
    t.area = build_area_table(observations, centers, radius_km, *vocab);
    t.implications = build_implications(observations, *vocab);
    t.global = build_global(observations, *vocab);
    for (const LanguageRecord* c : centers) t.area_centers.insert(c->wals_code);
    t.vocab = std::move(vocab);
    return t;
}

// Format, one record per line, fields separated by tabs:
//   #sources  <p1,p2,...>
//   #radius_km  <km>
//   center  <wals_code>
//   genus|family|area  <group_key>  <feature>  <total>  <majority>  <prior>  (<value> <count>)*
//   global  -  <feature>  <total>  <majority>  <prior>  (<value> <count>)*
//   implication  <cond_feature>  <cond_value>  <target_feature>  <implied>  <cond_prob>
//                <cond_count>  <implied_prior>  <target_count>  (<value> <count>)*
// Only nonzero counts are listed.
void write_tables(const AssociationTables& tables, std::ostream& out) {
    const Vocabulary& vocab = *tables.vocab;
    out << "#sources\t";
    bool first = true;
    for (Partition p : tables.sources) {
        out << (first ? "" : ",") << partition_name(p);
        first = false;
    }
    out << "\n#radius_km\t" << format_prob(tables.radius_km) << "\n";
    for (const auto& c : tables.area_centers) out << "center\t" << c << "\n";

    auto write_counts = [&](FeatureId f, const Histogram& h) {
        for (std::size_t v = 0; v < h.counts.size(); ++v)
            if (h.counts[v] > 0)
                out << '\t' << vocab.value_name(f, static_cast<ValueId>(v)) << '\t' << h.counts[v];
        out << '\n';
    };
    auto write_group = [&](std::string_view kind, std::string_view key, FeatureId f, const Histogram& h) {
        const auto m = majority(h);
        out << kind << '\t' << key << '\t' << vocab.feature_name(f) << '\t' << h.total << '\t'
            << vocab.value_name(f, m->value) << '\t' << format_prob(m->prior);
        write_counts(f, h);
    };

    for (GroupKind k : {GroupKind::genus, GroupKind::family, GroupKind::area})
        for (const auto& [key, h] : tables.table(k)) write_group(group_kind_name(k), key.group, key.feature, h);
    for (std::size_t f = 0; f < tables.global.size(); ++f)
        if (tables.global[f].total > 0) write_group("global", "-", static_cast<FeatureId>(f), tables.global[f]);
    for (const auto& [key, h] : tables.implications) {
        const auto m = majority(h);
        const Histogram& g = tables.global[static_cast<std::size_t>(key.target_feature)];
        const double prior = static_cast<double>(g.counts[static_cast<std::size_t>(m->value)]) /
                             static_cast<double>(g.total);
        out << "implication\t" << vocab.feature_name(key.cond_feature) << '\t'
            << vocab.value_name(key.cond_feature, key.cond_value) << '\t'
            << vocab.feature_name(key.target_feature) << '\t'
            << vocab.value_name(key.target_feature, m->value) << '\t' << format_prob(m->prior) << '\t'
            << h.total << '\t' << format_prob(prior) << '\t' << g.total;
        write_counts(key.target_feature, h);
    }
}

AssociationTables read_tables(std::istream& in, std::shared_ptr<const Vocabulary> vocab) {
    AssociationTables t;
    t.global.reserve(vocab->feature_count());
    for (std::size_t f = 0; f < vocab->feature_count(); ++f)
        t.global.emplace_back(vocab->value_count(static_cast<FeatureId>(f)));

    std::string line;
    std::size_t line_no = 0;
    auto feature = [&](const std::string& name) {
        const auto f = vocab->feature_id(name);
        if (!f) throw ParseError("unknown feature " + name, line_no);
        return *f;
    };
    auto value = [&](FeatureId f, const std::string& raw) {
        const auto v = vocab->value_id(f, raw);
        if (!v) throw ParseError("unknown value " + raw, line_no);
        return *v;
    };
    auto read_counts = [&](const std::vector<std::string>& cols, std::size_t from, FeatureId f) {
        Histogram h(vocab->value_count(f));
        if ((cols.size() - from) % 2 != 0) throw ParseError("odd value/count list", line_no);
        for (std::size_t i = from; i < cols.size(); i += 2) h.add(value(f, cols[i]), to_int(cols[i + 1], line_no));
        return h;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cols = split_tabs(line);
        const std::string& kind = cols[0];
        if (kind == "#sources") {
            std::stringstream ss(cols.size() > 1 ? cols[1] : "");
            std::string p;
            while (std::getline(ss, p, ','))
                if (auto part = parse_partition(p)) t.sources.insert(*part);
        } else if (kind == "#radius_km") {
            t.radius_km = std::stod(cols.at(1));
        } else if (kind == "center") {
            t.area_centers.insert(cols.at(1));
        } else if (kind == "genus" || kind == "family" || kind == "area" || kind == "global") {
            if (cols.size() < 6) throw ParseError("short group line", line_no);
            const FeatureId f = feature(cols[2]);
            Histogram h = read_counts(cols, 6, f);
            if (kind == "global") {
                t.global[static_cast<std::size_t>(f)] = std::move(h);
                continue;
            }
            GroupTable& table = kind == "genus" ? t.genus : kind == "family" ? t.family : t.area;
            table.emplace(GroupKey{cols[1], f}, std::move(h));
        } else if (kind == "implication") {
            if (cols.size() < 9) throw ParseError("short implication line", line_no);
            const FeatureId fi = feature(cols[1]);
            const FeatureId fj = feature(cols[3]);
            t.implications.emplace(ImplicationKey{fi, value(fi, cols[2]), fj}, read_counts(cols, 9, fj));
        } else {
            throw ParseError("unknown record kind '" + kind + "'", line_no);
        }
    }
    t.vocab = std::move(vocab);
    return t;
}

}  // namespace typology
