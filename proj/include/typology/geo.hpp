#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typology/corpus.hpp"

namespace typology {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultRadiusKm = 2500.0;

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline GeoPoint location(const LanguageRecord& r) { return {r.latitude, r.longitude}; }

// Great-circle distance on a sphere of radius kEarthRadiusKm. Exactly symmetric.
double haversine_km(GeoPoint a, GeoPoint b);

struct Site {
    std::string_view id;
    GeoPoint point;
};

struct Neighbor {
    std::string_view id;
    double distance_km = 0.0;
};

// Sites within radius_km (inclusive) of center, excluding `self`, ordered by
// ascending distance then id.
std::vector<Neighbor> neighborhood(GeoPoint center, std::span<const Site> sites, double radius_km,
                                   std::string_view self = {});

struct NearestHit {
    const LanguageRecord* language = nullptr;
    double distance_km = 0.0;
};

// Nearest candidate (other than `center` itself) with `feature` known; ties go to
// the lexicographically smaller wals_code.
std::optional<NearestHit> nearest_with_feature(const LanguageRecord& center,
                                               std::span<const LanguageRecord* const> candidates,
                                               std::string_view feature);

}  // namespace typology
