#include "typology/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "typology/errors.hpp"

namespace typology {

namespace {

constexpr std::array<std::string_view, 8> kColumns = {
    "wals_code", "name", "latitude", "longitude", "genus", "family", "countrycodes", "features"};

enum Column : std::size_t {
    kWalsCode, kName, kLatitude, kLongitude, kGenus, kFamily, kCountryCodes, kFeatures
};

struct Field {
    std::string raw;    // as in the file
    std::string value;  // unquoted
    bool quoted = false;
};

std::vector<Field> split_tab(std::string_view line) {
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        const auto piece = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
        out.push_back({std::string(piece), std::string(piece), false});
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// RFC 4180 style fields; quoted fields may contain commas and doubled quotes.
std::vector<Field> split_comma(std::string_view line, std::size_t line_no) {
    std::vector<Field> out;
    std::size_t i = 0;
    while (true) {
        Field f;
        const std::size_t begin = i;
        if (i < line.size() && line[i] == '"') {
            f.quoted = true;
            ++i;
            while (true) {
                if (i >= line.size()) throw ParseError("unterminated quoted field", line_no);
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        f.value += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                f.value += line[i++];
            }
            if (i < line.size() && line[i] != ',')
                throw ParseError("garbage after closing quote", line_no);
        } else {
            while (i < line.size() && line[i] != ',') f.value += line[i++];
        }
        f.raw = std::string(line.substr(begin, i - begin));
        out.push_back(std::move(f));
        if (i >= line.size()) break;
        ++i;  // skip comma
    }
    return out;
}

double parse_coordinate(const std::string& text, double limit, std::string_view what,
                        std::size_t line_no) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && *first == ' ') ++first;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw ParseError("non-numeric " + std::string(what) + " '" + text + "'", line_no);
    if (v < -limit || v > limit)
        throw ParseError(std::string(what) + " out of range: " + text, line_no);
    return v;
}

std::vector<std::pair<std::string, FeatureValue>> parse_features(const std::string& text,
                                                                 std::size_t line_no) {
    std::vector<std::pair<std::string, FeatureValue>> out;
    if (text.empty()) return out;
    std::unordered_set<std::string> seen;
    std::size_t start = 0;
    while (true) {
        const auto bar = text.find('|', start);
        const std::string item =
            text.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("feature item without '=': " + item, line_no);
        std::string name = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (name.empty()) throw ParseError("empty feature name", line_no);
        if (value.empty()) throw ParseError("empty value for feature " + name, line_no);
        if (!seen.insert(name).second) throw ParseError("duplicate feature " + name, line_no);
        out.emplace_back(std::move(name), FeatureValue::from_raw(std::move(value)));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

std::vector<std::string> split_country_codes(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ' || c == ',' || c == ';') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

// Field texts for a record built in memory rather than parsed from a file.
std::vector<std::string> synthesize_fields(const LanguageRecord& rec, char delimiter) {
    std::string codes;
    for (std::size_t i = 0; i < rec.countrycodes.size(); ++i) {
        if (i > 0) codes += ' ';
        codes += rec.countrycodes[i];
    }
    std::vector<std::string> fields = {rec.wals_code, rec.name, format_double(rec.latitude),
                                       format_double(rec.longitude), rec.genus, rec.family,
                                       codes, ""};
    if (delimiter == ',') {
        for (auto& f : fields)
            if (f.find_first_of(",\"") != std::string::npos) f = quote(f);
    }
    return fields;
}

}  // namespace

std::string_view partition_name(Partition p) {
    switch (p) {
        case Partition::train: return "train";
        case Partition::dev: return "dev";
        case Partition::test: return "test";
    }
    return "?";
}

std::optional<Partition> parse_partition(std::string_view name) {
    if (name == "train") return Partition::train;
    if (name == "dev") return Partition::dev;
    if (name == "test") return Partition::test;
    return std::nullopt;
}

std::string_view source_name(PredictionSource s) {
    switch (s) {
        case PredictionSource::b1: return "b1";
        case PredictionSource::b2: return "b2";
        case PredictionSource::b3: return "b3";
        case PredictionSource::b4: return "b4";
        case PredictionSource::b5: return "b5";
        case PredictionSource::ridge_system1: return "ridge-system1";
        case PredictionSource::ridge_system2: return "ridge-system2";
        case PredictionSource::constant: return "constant";
        case PredictionSource::fallback: return "fallback";
    }
    return "?";
}

std::span<const std::string_view> corpus_columns() { return kColumns; }

const FeatureValue* LanguageRecord::find(std::string_view feature) const {
    for (const auto& [name, value] : features)
        if (name == feature) return &value;
    return nullptr;
}

const std::string* LanguageRecord::known_value(std::string_view feature) const {
    const FeatureValue* v = find(feature);
    return v != nullptr && v->known ? &v->raw : nullptr;
}

const LanguageRecord* Corpus::find(std::string_view wals_code) const {
    for (const auto& r : records)
        if (r.wals_code == wals_code) return &r;
    return nullptr;
}

Corpus parse_corpus(std::string_view text, Partition partition) {
    Corpus corpus;
    corpus.partition = partition;

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (lines.empty()) throw ParseError("empty file, header expected", 1);

    std::string_view header = lines.front();
    if (!header.empty() && header.back() == '\r') {
        corpus.line_ending = "\r\n";
        header.remove_suffix(1);
    }
    corpus.header_line = std::string(header);
    corpus.delimiter = header.find('\t') != std::string_view::npos ? '\t' : ',';

    auto split = [&](std::string_view line, std::size_t line_no) {
        return corpus.delimiter == '\t' ? split_tab(line) : split_comma(line, line_no);
    };

    const auto header_fields = split(header, 1);
    bool header_ok = header_fields.size() == kColumns.size();
    for (std::size_t i = 0; header_ok && i < kColumns.size(); ++i)
        header_ok = header_fields[i].value == kColumns[i];
    if (!header_ok) throw ParseError("header does not match the expected eight columns", 1);

    std::unordered_set<std::string> codes;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        std::string_view line = lines[li];
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (li + 1 == lines.size()) break;
            throw ParseError("blank line", line_no);
        }
        auto fields = split(line, line_no);
        if (fields.size() != kColumns.size())
            throw ParseError("expected " + std::to_string(kColumns.size()) + " columns, got " +
                                 std::to_string(fields.size()),
                             line_no);

        LanguageRecord rec;
        rec.wals_code = fields[kWalsCode].value;
        if (rec.wals_code.empty()) throw ParseError("empty wals_code", line_no);
        rec.name = fields[kName].value;
        rec.latitude = parse_coordinate(fields[kLatitude].value, 90.0, "latitude", line_no);
        rec.longitude = parse_coordinate(fields[kLongitude].value, 180.0, "longitude", line_no);
        rec.genus = fields[kGenus].value;
        rec.family = fields[kFamily].value;
        rec.countrycodes = split_country_codes(fields[kCountryCodes].value);
        rec.features = parse_features(fields[kFeatures].value, line_no);
        rec.raw_fields.reserve(fields.size());
        for (auto& f : fields) rec.raw_fields.push_back(std::move(f.raw));

        if (!codes.insert(rec.wals_code).second)
            throw ValidationError("duplicate wals_code '" + rec.wals_code + "' at line " +
                                  std::to_string(line_no));
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

Corpus parse_corpus(std::istream& in, Partition partition) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus(std::string_view(buf.str()), partition);
}

Corpus load_corpus(const std::filesystem::path& path, Partition partition) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return parse_corpus(in, partition);
}

std::string render_predictions(const Corpus& corpus, std::span<const Prediction> predictions) {
    std::map<std::pair<std::string_view, std::string_view>, const Prediction*> by_slot;
    for (const auto& p : predictions) {
        if (!by_slot.emplace(std::pair<std::string_view, std::string_view>(p.language, p.feature), &p)
                 .second)
            throw CompletenessError("duplicate prediction for " + p.language + "/" + p.feature);
    }

    std::size_t used = 0;
    std::string out = corpus.header_line + corpus.line_ending;
    for (const auto& rec : corpus.records) {
        bool substituted = false;
        std::string features;
        for (std::size_t i = 0; i < rec.features.size(); ++i) {
            const auto& [name, value] = rec.features[i];
            const auto it = by_slot.find({rec.wals_code, name});
            std::string_view raw = value.raw;
            if (it != by_slot.end()) {
                if (value.known)
                    throw CompletenessError("prediction for known slot " + rec.wals_code + "/" +
                                            name);
                raw = it->second->value.raw;
                substituted = true;
                ++used;
            } else if (!value.known) {
                throw CompletenessError("missing prediction for " + rec.wals_code + "/" + name);
            }
            if (i > 0) features += '|';
            features += name;
            features += '=';
            features += raw;
        }

        const std::vector<std::string> fields =
            rec.raw_fields.size() == kColumns.size() ? rec.raw_fields
                                                     : synthesize_fields(rec, corpus.delimiter);
        if (rec.raw_fields.size() != kColumns.size()) substituted = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c > 0) out += corpus.delimiter;
            if (c == kFeatures && substituted) {
                const bool was_quoted = !fields[c].empty() && fields[c][0] == '"';
                const bool needs_quote =
                    corpus.delimiter == ',' &&
                    (was_quoted || features.find_first_of(",\"") != std::string::npos);
                out += needs_quote ? quote(features) : features;
            } else {
                out += fields[c];
            }
        }
        out += corpus.line_ending;
    }
    if (used != by_slot.size())
        throw CompletenessError(std::to_string(by_slot.size() - used) +
                                " prediction(s) do not match any slot in the corpus");
    return out;
}

void write_predictions(const Corpus& corpus, std::span<const Prediction> predictions,
                       const std::filesystem::path& path) {
    const std::string text = render_predictions(corpus, predictions);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

StatsSummary corpus_stats(std::span<const LanguageRecord> records) {
    StatsSummary s;
    std::set<std::string_view> families, genera, types;
    std::set<std::pair<std::string_view, std::string_view>> values;
    for (const auto& r : records) {
        ++s.languages;
        if (!r.family.empty()) families.insert(r.family);
        if (!r.genus.empty()) genera.insert(r.genus);
        for (const auto& [name, value] : r.features) {
            if (!value.known) {
                ++s.unknown_slots;
                continue;
            }
            ++s.observed_values;
            types.insert(name);
            values.emplace(name, value.raw);
        }
    }
    s.families = families.size();
    s.genera = genera.size();
    s.feature_types = types.size();
    s.feature_values = values.size();
    return s;
}

StatsSummary corpus_stats(const Corpus& corpus) { return corpus_stats(corpus.records); }

std::string map_geojson(std::span<const Corpus> corpora) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& c : corpora) {
        for (const auto& r : c.records) {
            features.push_back({
                {"type", "Feature"},
                {"geometry", {{"type", "Point"}, {"coordinates", {r.longitude, r.latitude}}}},
                {"properties",
                 {{"wals_code", r.wals_code},
                  {"name", r.name},
                  {"genus", r.genus},
                  {"family", r.family},
                  {"partition", std::string(partition_name(c.partition))}}},
            });
        }
    }
    const nlohmann::json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return doc.dump(1) + "\n";
}

void export_map(std::span<const Corpus> corpora, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << map_geojson(corpora);
}

}  // namespace typology
