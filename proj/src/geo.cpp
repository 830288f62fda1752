#include "typology/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "typology/kernels.hpp"

namespace typology {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine_km(GeoPoint a, GeoPoint b) {
    // Canonical argument order makes the result exactly symmetric.
    if (std::tie(b.latitude, b.longitude) < std::tie(a.latitude, a.longitude)) std::swap(a, b);
    const double phi1 = a.latitude * kDegToRad;
    const double phi2 = b.latitude * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.longitude - a.longitude) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double c1 = std::sin((phi1 + phi2) / 2.0);
    const double c2 = std::cos(dlambda / 2.0);
    const double cc = std::cos(phi1) * std::cos(phi2);
    // h and 1 - h, each evaluated without cancellation
    const double h = std::max(0.0, s1 * s1 + cc * s2 * s2);
    const double g = std::max(0.0, c1 * c1 + cc * c2 * c2);
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(g));
}

std::vector<Neighbor> neighborhood(GeoPoint center, std::span<const Site> sites, double radius_km,
                                   std::string_view self) {
    std::vector<GeoPoint> points;
    points.reserve(sites.size());
    for (const auto& s : sites) points.push_back(s.point);
    const std::vector<double> dist = kernels::distances_from(center, points);

    std::vector<Neighbor> out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!self.empty() && sites[i].id == self) continue;
        if (dist[i] <= radius_km) out.push_back({sites[i].id, dist[i]});
    }
    std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) {
        return std::tie(x.distance_km, x.id) < std::tie(y.distance_km, y.id);
    });
    return out;
}

std::optional<NearestHit> nearest_with_feature(const LanguageRecord& center,
                                               std::span<const LanguageRecord* const> candidates,
                                               std::string_view feature) {
    std::optional<NearestHit> best;
    const GeoPoint c = location(center);
    for (const LanguageRecord* cand : candidates) {
        if (cand->wals_code == center.wals_code) continue;
        if (cand->known_value(feature) == nullptr) continue;
        const double d = haversine_km(c, location(*cand));
        if (!best || d < best->distance_km ||
            (d == best->distance_km && cand->wals_code < best->language->wals_code))
            best = NearestHit{cand, d};
    }
    return best;
}

}  // namespace typology
