#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "typology/geo.hpp"

using namespace typology;

TEST_SUITE("geo") {
    TEST_CASE("haversine against a high-precision oracle") {
        // 40-digit evaluation; the law of cosines agrees to 30 digits.
        CHECK(haversine_km({8.0, 4.3}, {6.5, 3.4}) == doctest::Approx(194.09971199213855).epsilon(1e-12));
        CHECK(haversine_km({51.5, -0.13}, {40.71, -74.0}) == doctest::Approx(5570.137185793745).epsilon(1e-12));
        CHECK(std::abs(haversine_km({0, 0}, {0, 180}) - std::numbers::pi * kEarthRadiusKm) < 1e-9);
        CHECK(haversine_km({12.5, 33.0}, {12.5, 33.0}) == 0.0);
    }

    TEST_CASE("symmetry is exact") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
        for (int i = 0; i < 1000; ++i) {
            const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
            CHECK(haversine_km(a, b) == haversine_km(b, a));
        }
    }

    TEST_CASE("neighbourhood is inclusive, excludes self, sorted") {
        const GeoPoint c{0, 0};
        const double one_degree = haversine_km(c, {0, 1});
        const std::vector<Site> sites = {
            {"self", {0, 0}}, {"b", {0, 1}}, {"a", {1, 0}}, {"far", {0, 40}}, {"near", {0, 0.5}}};
        const auto n = neighborhood(c, sites, one_degree, "self");
        REQUIRE(n.size() == 3);
        CHECK(n[0].id == "near");
        // a and b are equidistant at the radius: ties by id
        CHECK(n[1].id == "a");
        CHECK(n[2].id == "b");
        CHECK(neighborhood(c, sites, one_degree * (1 - 1e-12), "self").size() == 1);
    }

    TEST_CASE("nearest with feature skips the center and breaks ties by code") {
        auto rec = [](std::string code, double lat, double lon, bool has) {
            LanguageRecord r;
            r.wals_code = std::move(code);
            r.latitude = lat;
            r.longitude = lon;
            if (has) r.features.push_back({"F", FeatureValue{"1 a", true}});
            else r.features.push_back({"F", FeatureValue{"?", false}});
            return r;
        };
        const LanguageRecord center = rec("c", 0, 0, true);
        const LanguageRecord x = rec("x", 0, 2, true), y = rec("b", 0, -2, true), z = rec("z", 0, 1, false);
        const std::vector<const LanguageRecord*> pool = {&center, &x, &y, &z};
        const auto hit = nearest_with_feature(center, pool, "F");
        REQUIRE(hit);
        CHECK(hit->language->wals_code == "b");
        CHECK_FALSE(nearest_with_feature(center, std::vector<const LanguageRecord*>{&center, &z}, "F"));
    }
}
