#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace typology {

enum class Partition { train, dev, test };

std::string_view partition_name(Partition p);
std::optional<Partition> parse_partition(std::string_view name);

inline constexpr std::string_view kUnknownMarker = "?";

struct FeatureValue {
    std::string raw;
    bool known = false;

    static FeatureValue from_raw(std::string raw) {
        const bool known = raw != kUnknownMarker;
        return {std::move(raw), known};
    }
    friend bool operator==(const FeatureValue&, const FeatureValue&) = default;
};

struct LanguageRecord {
    std::string wals_code;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    std::string genus;
    std::string family;
    std::vector<std::string> countrycodes;
    // File order is kept so that rewriting a row reproduces it.
    std::vector<std::pair<std::string, FeatureValue>> features;

    // Field text exactly as it appeared in the file (including any quoting).
    std::vector<std::string> raw_fields;

    const FeatureValue* find(std::string_view feature) const;
    // Known value of `feature`, or nullptr when absent or "?".
    const std::string* known_value(std::string_view feature) const;
};

struct Corpus {
    Partition partition = Partition::train;
    std::vector<LanguageRecord> records;
    std::string header_line;
    std::string line_ending = "\n";
    char delimiter = '\t';

    const LanguageRecord* find(std::string_view wals_code) const;
};

enum class PredictionSource { b1, b2, b3, b4, b5, ridge_system1, ridge_system2, constant, fallback };

std::string_view source_name(PredictionSource s);

struct Prediction {
    std::string language;
    std::string feature;
    FeatureValue value;
    PredictionSource source = PredictionSource::fallback;
};

struct StatsSummary {
    std::size_t languages = 0;
    std::size_t families = 0;
    std::size_t genera = 0;
    std::size_t feature_types = 0;
    std::size_t feature_values = 0;
    std::size_t observed_values = 0;
    std::size_t unknown_slots = 0;

    friend bool operator==(const StatsSummary&, const StatsSummary&) = default;
};

// Header columns, in required order.
std::span<const std::string_view> corpus_columns();

Corpus parse_corpus(std::istream& in, Partition partition);
Corpus parse_corpus(std::string_view text, Partition partition);
Corpus load_corpus(const std::filesystem::path& path, Partition partition);

// Renders `corpus` with every unknown slot replaced by its prediction. Rows without
// substitutions are emitted byte-for-byte; output always ends with a line ending.
std::string render_predictions(const Corpus& corpus, std::span<const Prediction> predictions);
void write_predictions(const Corpus& corpus, std::span<const Prediction> predictions,
                       const std::filesystem::path& path);

StatsSummary corpus_stats(const Corpus& corpus);
StatsSummary corpus_stats(std::span<const LanguageRecord> records);

// GeoJSON FeatureCollection of language points tagged with their partition.
std::string map_geojson(std::span<const Corpus> corpora);
void export_map(std::span<const Corpus> corpora, const std::filesystem::path& path);

}  // namespace typology
