#include <doctest.h>

#include "synthetic.hpp"
#include "typology/baselines.hpp"
#include "typology/pipeline.hpp"

using namespace typology;

namespace {

// Global X counts: p 2, q 3, r 1.
std::string toy_text() {
    return synthetic::header() +
           "a\tA\t0\t0\tG1\tF1\t\tX=p\n"
           "b\tB\t0\t1\tG1\tF1\t\tX=p\n"
           "c\tC\t0\t2\tG2\tF1\t\tX=q\n"
           "d\tD\t0\t50\tG3\tF2\t\tX=q\n"
           "e\tE\t0\t51\tG3\tF2\t\tX=r\n"
           "f\tF\t0\t3\tG4\tF2\t\tX=q\n";
}

std::string query_text() {
    return synthetic::header() + "z\tZ\t0\t100\tG9\tF9\t\tX=?|Y=?\n";
}

struct Fixture {
    Dataset data{parse_corpus(std::string_view(toy_text()), Partition::train), std::nullopt,
                 parse_corpus(std::string_view(query_text()), Partition::test)};
    AssociationTables tables = build_tables_for(data, {Partition::train}, 2500.0);
    std::vector<const LanguageRecord*> est = data.records({Partition::train});
    Baselines b{tables, est};

    const LanguageRecord& lang(std::string_view code) const {
        if (const auto* r = data.train().find(code)) return *r;
        return *data.test()->find(code);
    }
    std::string run(BaselineKind k, std::string_view code, std::string_view feature = "X") const {
        return b.predict(k, lang(code), feature).value.raw;
    }
};

}  // namespace

TEST_SUITE("baselines") {
    TEST_CASE("global majority masks the queried value") {
        Fixture f;
        CHECK(f.run(BaselineKind::b1, "a") == "q");
        // q loses one observation: q 2 ties with p 2, smallest value wins
        CHECK(f.run(BaselineKind::b1, "c") == "p");
        CHECK(f.run(BaselineKind::b1, "z") == "q");
        CHECK(f.b.predict(BaselineKind::b1, f.lang("a"), "X").source == PredictionSource::b1);
    }

    TEST_CASE("clade majority falls back genus, family, global") {
        Fixture f;
        CHECK(f.run(BaselineKind::b2, "a") == "p");  // genus G1 without a: {p}
        CHECK(f.run(BaselineKind::b2, "c") == "p");  // G2 empty after masking; F1 without c: {p, p}
        CHECK(f.run(BaselineKind::b2, "e") == "q");  // G3 without e: {q}
        CHECK(f.run(BaselineKind::b2, "z") == "q");  // unknown clades: global
    }

    TEST_CASE("nearest language and clade-restricted nearest") {
        Fixture f;
        CHECK(f.run(BaselineKind::b3, "a") == "p");
        CHECK(f.run(BaselineKind::b3, "e") == "q");
        CHECK(f.run(BaselineKind::b3, "z") == "r");  // e at 49 degrees is closest
        CHECK(f.run(BaselineKind::b4, "a") == "p");
        CHECK(f.run(BaselineKind::b4, "c") == "p");  // no other G2 member; nearest in F1 is b
        CHECK(f.run(BaselineKind::b4, "f") == "q");  // nearest in F2 is d, although c is closer overall
        CHECK(f.run(BaselineKind::b4, "z") == "r");
    }

    TEST_CASE("ensemble vote") {
        Fixture f;
        // area {b p, c q, f q} -> q; genus -> p; family F1 without a {p, q} -> p
        CHECK(f.run(BaselineKind::b5, "a") == "p");
        // one vote only (nearest language) -> global majority
        CHECK(f.run(BaselineKind::b5, "z") == "q");
        CHECK(f.b.predict(BaselineKind::b5, f.lang("z"), "X").source == PredictionSource::b5);
    }

    TEST_CASE("no estimate falls back to a deterministic value") {
        Fixture f;
        CHECK_THROWS_AS(f.b.predict(BaselineKind::b1, f.lang("z"), "Y"), NoEstimate);
        CHECK_THROWS_AS(f.b.predict(BaselineKind::b3, f.lang("z"), "Y"), NoEstimate);
        CHECK_THROWS_AS(f.b.predict(BaselineKind::b2, f.lang("z"), "Unheard"), NoEstimate);
        const Prediction p = f.b.predict_total(BaselineKind::b2, f.lang("z"), "Y");
        CHECK(p.value.raw == "?");
        CHECK(p.source == PredictionSource::fallback);
        CHECK(f.b.fallback(f.lang("z"), "X").value.raw == "p");
    }

    TEST_CASE("names") {
        CHECK(parse_baseline("b4") == BaselineKind::b4);
        CHECK_FALSE(parse_baseline("b6"));
        CHECK(baseline_name(BaselineKind::b5) == "b5");
    }
}
