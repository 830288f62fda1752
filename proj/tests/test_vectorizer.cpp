#include <doctest.h>

#include <cmath>

#include "synthetic.hpp"
#include "typology/pipeline.hpp"
#include "typology/vectorizer.hpp"

using namespace typology;

namespace {

std::string toy_text() {
    return synthetic::header() +
           "a\tA\t0\t0\tG1\tF\t\tX=a|Y=p\n"
           "b\tB\t0\t1\tG1\tF\t\tX=a|Y=q\n"
           "c\tC\t0\t2\tG2\tF\t\tX=b|Y=p\n"
           "d\tD\t0\t100\t\t\t\tX=b|Y=r\n";
}

Dataset toy() { return Dataset(parse_corpus(std::string_view(toy_text()), Partition::train), std::nullopt, std::nullopt); }

std::size_t column(const VectorSchema& s, const std::string& name) {
    const auto names = s.column_names();
    const auto it = std::find(names.begin(), names.end(), name);
    REQUIRE(it != names.end());
    return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

TEST_SUITE("vectorizer") {
    TEST_CASE("hand-counted schema of a toy corpus") {
        const Dataset data = toy();
        const AssociationTables t = build_tables_for(data, {Partition::train}, 2500.0);
        const auto rows = data.coded({Partition::train});
        const TrainingSet ts = build_training_set("X", t, rows);
        const VectorSchema& s = ts.schema;
        REQUIRE(s.slots.size() == 4);
        CHECK(s.slots[0].vocab == std::vector<std::string>{"", "a", "b"});  // genus
        CHECK(s.slots[1].vocab == std::vector<std::string>{"", "a"});       // family
        CHECK(s.slots[2].vocab == std::vector<std::string>{"", "a"});       // area
        CHECK(s.slots[3].cond_feature == "Y");
        CHECK(s.slots[3].vocab == std::vector<std::string>{"", "a", "b"});
        CHECK(s.numeric_columns.size() == 12);
        CHECK(s.one_hot_width() == 10);
        CHECK(s.dimension() == 22);
        CHECK(ts.rows.rows() == 4);
        CHECK(ts.rows.cols() == 22);
        CHECK(s.column_names().size() == 22);
    }

    TEST_CASE("missing associations use the sentinels") {
        const Dataset data = toy();
        const AssociationTables t = build_tables_for(data, {Partition::train}, 2500.0);
        const auto rows = data.coded({Partition::train});
        const FeatureId x = *t.vocab->feature_id("X");
        const RawVector d = raw_vector(rows[3], x, t);
        REQUIRE(d.categorical.size() == 4);
        CHECK(d.categorical[0] == kNoValue);
        CHECK(d.categorical[1] == kNoValue);
        CHECK(d.categorical[2] == kNoValue);
        CHECK(d.categorical[3] == *t.vocab->value_id(x, "b"));
        CHECK(d.numeric[2] == std::log(1e-6));
        CHECK(d.numeric[3] == 0.0);
        CHECK(d.numeric[6] == std::log(1e-6));
        CHECK(d.numeric[7] == 0.0);

        const RawVector a = raw_vector(rows[0], x, t);
        CHECK(a.numeric[0] == 0.0);  // latitude
        CHECK(a.numeric[2] == 0.0);  // log prior of genus G1 = log 1
        CHECK(a.numeric[3] == 2.0);
        CHECK(a.numeric[4] == doctest::Approx(std::log(2.0 / 3.0)));
        // impl[Y]: Y=p -> X in {a, b}, tie to "a"; prior of "a" is 2/4 over target count 4
        CHECK(a.numeric[8] == doctest::Approx(std::log(0.5)));
        CHECK(a.numeric[9] == 2.0);
        CHECK(a.numeric[10] == doctest::Approx(std::log(0.5)));
        CHECK(a.numeric[11] == 4.0);

        const TrainingSet ts = build_training_set("X", t, rows);
        CHECK(ts.rows(3, column(ts.schema, "genus.value=<null>")) == 1.0);
        CHECK(ts.rows(0, column(ts.schema, "genus.value=a")) == 1.0);
        CHECK(ts.rows(0, column(ts.schema, "genus.value=<null>")) == 0.0);
    }

    TEST_CASE("numeric columns are standardized over the training rows") {
        const Dataset data = toy();
        const AssociationTables t = build_tables_for(data, {Partition::train}, 2500.0);
        const auto rows = data.coded({Partition::train});
        const TrainingSet ts = build_training_set("X", t, rows);
        const std::size_t lat = column(ts.schema, "latitude");
        const std::size_t lon = column(ts.schema, "longitude");
        double mean = 0, sq = 0;
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(ts.rows(r, lat) == 0.0);  // zero variance: divided by 1 after centering
            mean += ts.rows(r, lon);
            sq += ts.rows(r, lon) * ts.rows(r, lon);
        }
        CHECK(std::abs(mean) < 1e-12);
        CHECK(sq / 4 == doctest::Approx(1.0));
        CHECK(ts.schema.stddev[0] == 1.0);
    }

    TEST_CASE("values unseen in training map to the null column") {
        const Dataset data = toy();
        const AssociationTables t = build_tables_for(data, {Partition::train}, 2500.0);
        const auto rows = data.coded({Partition::train});
        const TrainingSet ts = build_training_set("X", t, rows);
        const FeatureId x = *t.vocab->feature_id("X");
        RawVector raw = raw_vector(rows[0], x, t);
        raw.categorical[1] = *t.vocab->value_id(x, "b");  // family slot only saw "a"
        const Matrix m = encode_rows(ts.schema, *t.vocab, std::span<const RawVector>(&raw, 1));
        CHECK(m(0, column(ts.schema, "family.value=<null>")) == 1.0);
        CHECK(m(0, column(ts.schema, "family.value=a")) == 0.0);
    }

    TEST_CASE("a single class is degenerate") {
        const std::string text = synthetic::header() + "a\tA\t0\t0\tG\tF\t\tX=a|Y=p\nb\tB\t0\t1\tG\tF\t\tX=a|Y=q\n";
        const Dataset data(parse_corpus(std::string_view(text), Partition::train), std::nullopt, std::nullopt);
        const AssociationTables t = build_tables_for(data, {Partition::train}, 2500.0);
        const auto rows = data.coded({Partition::train});
        CHECK_THROWS_AS(build_training_set("X", t, rows), DegenerateTarget);
        CHECK_THROWS_AS(build_training_set("nope", t, rows), ContractError);
    }

    TEST_CASE("schema hash and vectorize agree with the training rows") {
        synthetic::Params p;
        p.seed = 4;
        const auto s = synthetic::make_splits(p, 80, 20, 20);
        const Dataset data(parse_corpus(std::string_view(s.train), Partition::train),
                           parse_corpus(std::string_view(s.dev), Partition::dev),
                           parse_corpus(std::string_view(s.test_blinded), Partition::test));
        const AssociationTables t = build_tables_for(data, {Partition::train, Partition::dev}, 2500.0);
        const auto rows = data.coded({Partition::train, Partition::dev});
        const TrainingSet ts = build_training_set("Feature_03", t, rows);
        CHECK(build_schema("Feature_03", t, rows).hash() == ts.schema.hash());
        const LanguageVector v = vectorize(*ts.languages[5], ts.schema, t);
        const auto row = ts.rows.row(5);
        CHECK(std::vector<double>(row.begin(), row.end()) == v.values);
        const LanguageVector w = vectorize(*ts.languages[5]->record, ts.schema, t);
        CHECK(w.values == v.values);
        CHECK(describe(v, ts.schema).size() == ts.schema.dimension());
        const TrainingSet other = build_training_set("Feature_04", t, rows);
        CHECK(other.schema.hash() != ts.schema.hash());
    }
}
