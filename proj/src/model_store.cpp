#include "typology/model_store.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace typology {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'Y', 'P', 'R', 'I', 'D', 'G', 'E'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

std::string hex(std::uint64_t h) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

std::string_view weighting_name(ClassWeighting w) { return w == ClassWeighting::balanced ? "balanced" : "none"; }

json partitions_json(const std::set<Partition>& ps) {
    json a = json::array();
    for (Partition p : ps) a.push_back(std::string(partition_name(p)));
    return a;
}

std::set<Partition> partitions_from(const json& a) {
    std::set<Partition> out;
    for (const auto& s : a) {
        const auto p = parse_partition(s.get<std::string>());
        if (!p) throw Error("model store: unknown partition " + s.get<std::string>());
        out.insert(*p);
    }
    return out;
}

SlotKind parse_slot_kind(std::string_view s) {
    for (SlotKind k : {SlotKind::genus, SlotKind::family, SlotKind::area, SlotKind::implication})
        if (slot_kind_name(k) == s) return k;
    throw Error("model store: unknown slot kind " + std::string(s));
}

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("model store: truncated file");
    return v;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in, std::size_t n) {
    std::vector<double> v(n);
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw Error("model store: truncated file");
    return v;
}

void write_estimator(const RidgeEstimator& est, const std::filesystem::path& file) {
    const VectorSchema& s = est.schema;
    json h;
    h["target"] = est.target_feature;
    h["classes"] = est.classes;
    h["alpha"] = est.alpha;
    h["feature_order"] = s.feature_order;
    json slots = json::array();
    for (const auto& slot : s.slots)
        slots.push_back({{"kind", slot_kind_name(slot.kind)}, {"cond_feature", slot.cond_feature}, {"vocab", slot.vocab}});
    h["slots"] = std::move(slots);
    h["numeric_columns"] = s.numeric_columns;
    h["dimension"] = s.dimension();
    h["schema_hash"] = hex(s.hash());
    const std::string header = h.dump();

    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out.write(kMagic, sizeof kMagic);
    put(out, kVersion);
    put(out, static_cast<std::uint64_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    put_doubles(out, s.mean);
    put_doubles(out, s.stddev);
    put_doubles(out, est.weights.data());
    put_doubles(out, est.intercepts);
    if (!out) throw Error("failed writing " + file.string());
}

RidgeEstimator read_estimator(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic))
        throw Error(file.string() + ": not a ridge model file");
    if (get<std::uint32_t>(in) != kVersion) throw Error(file.string() + ": unsupported version");
    const auto len = get<std::uint64_t>(in);
    std::string header(len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(len))) throw Error(file.string() + ": truncated header");

    RidgeEstimator est;
    try {
        const json h = json::parse(header);
        est.target_feature = h.at("target").get<std::string>();
        est.classes = h.at("classes").get<std::vector<std::string>>();
        est.alpha = h.at("alpha").get<double>();
        VectorSchema& s = est.schema;
        s.target_feature = est.target_feature;
        s.feature_order = h.at("feature_order").get<std::vector<std::string>>();
        for (const auto& slot : h.at("slots"))
            s.slots.push_back({parse_slot_kind(slot.at("kind").get<std::string>()),
                               slot.at("cond_feature").get<std::string>(),
                               slot.at("vocab").get<std::vector<std::string>>()});
        s.numeric_columns = h.at("numeric_columns").get<std::vector<std::string>>();
        const std::size_t m = s.numeric_columns.size();
        s.mean = get_doubles(in, m);
        s.stddev = get_doubles(in, m);
        const std::size_t d = s.dimension();
        if (d != h.at("dimension").get<std::size_t>()) throw Error(file.string() + ": dimension mismatch");
        const std::size_t k = est.classes.size();
        est.weights = Matrix(d, k);
        est.weights.data() = get_doubles(in, d * k);
        est.intercepts = get_doubles(in, k);
        if (hex(s.hash()) != h.at("schema_hash").get<std::string>())
            throw Error(file.string() + ": schema hash does not match its contents");
    } catch (const json::exception& e) {
        throw Error(file.string() + ": bad header: " + e.what());
    }
    if (in.peek() != std::char_traits<char>::eof()) throw Error(file.string() + ": trailing bytes");
    return est;
}

}  // namespace

void save_models(const ModelSet& models, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const TrainConfig& c = models.config;
    json manifest;
    manifest["format"] = "typology-models";
    manifest["version"] = kVersion;
    manifest["system"] = system_name(c.system);
    manifest["alpha"] = c.alpha;
    manifest["radius_km"] = c.radius_km;
    manifest["weighting"] = weighting_name(c.weighting);
    manifest["table_partitions"] = partitions_json(c.table_partitions);
    manifest["row_partitions"] = partitions_json(c.row_partitions);
    manifest["skipped"] = models.skipped;
    json features = json::array();
    std::size_t index = 0;
    for (const auto& [feature, model] : models.models) {
        json entry;
        entry["feature"] = feature;
        if (const auto* constant = std::get_if<ConstantModel>(&model)) {
            entry["kind"] = "constant";
            entry["value"] = constant->value;
        } else {
            const auto& est = std::get<RidgeEstimator>(model);
            char name[32];
            std::snprintf(name, sizeof name, "model_%04zu.bin", index++);
            entry["kind"] = "ridge";
            entry["file"] = name;
            entry["schema_hash"] = hex(est.schema.hash());
            write_estimator(est, dir / name);
        }
        features.push_back(std::move(entry));
    }
    manifest["features"] = std::move(features);
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

ModelSet load_models(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json", std::ios::binary);
    if (!in) throw Error("no model store at " + dir.string());
    ModelSet set;
    try {
        const json m = json::parse(in);
        if (m.at("format") != "typology-models") throw Error(dir.string() + ": not a model store");
        const auto system = parse_system(m.at("system").get<std::string>());
        if (!system) throw Error(dir.string() + ": unknown system");
        TrainConfig& c = set.config;
        c.system = *system;
        c.alpha = m.at("alpha").get<double>();
        c.radius_km = m.at("radius_km").get<double>();
        c.weighting = m.at("weighting") == "balanced" ? ClassWeighting::balanced : ClassWeighting::none;
        c.table_partitions = partitions_from(m.at("table_partitions"));
        c.row_partitions = partitions_from(m.at("row_partitions"));
        set.skipped = m.at("skipped").get<std::vector<std::string>>();
        for (const auto& entry : m.at("features")) {
            const auto feature = entry.at("feature").get<std::string>();
            if (entry.at("kind") == "constant") {
                set.models.emplace(feature, ConstantModel{entry.at("value").get<std::string>()});
                continue;
            }
            RidgeEstimator est = read_estimator(dir / entry.at("file").get<std::string>());
            if (est.target_feature != feature || hex(est.schema.hash()) != entry.at("schema_hash").get<std::string>())
                throw Error("model store entry for " + feature + " does not match its file");
            set.models.emplace(feature, std::move(est));
        }
    } catch (const json::exception& e) {
        throw Error(dir.string() + ": bad manifest: " + e.what());
    }
    return set;
}

}  // namespace typology
