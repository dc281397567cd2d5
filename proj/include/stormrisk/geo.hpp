#pragma once

#include <cmath>
#include <stdexcept>

namespace stormrisk {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadiusKm = 6371.0;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Geographic point, angles in radians.
struct GeoPoint {
    double phi = 0.0;     // latitude
    double lambda = 0.0;  // longitude

    static GeoPoint from_degrees(double lat_deg, double lon_deg) {
        return GeoPoint{deg2rad(lat_deg), deg2rad(lon_deg)};
    }
    bool valid() const {
        return std::abs(phi) <= kPi / 2 + 1e-12 && std::abs(lambda) <= kPi + 1e-12;
    }
};

/// Great-circle distance in km (haversine form, R = 6371 km).
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    const double dphi = b.phi - a.phi;
    const double dlambda = b.lambda - a.lambda;
    const double sp = std::sin(dphi / 2);
    const double sl = std::sin(dlambda / 2);
    double h = sp * sp + std::cos(a.phi) * std::cos(b.phi) * sl * sl;
    if (h < 0.0) h = 0.0;
    if (h > 1.0) h = 1.0;
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

/// Initial bearing of `target` as seen from `center`, measured clockwise
/// from north, in (-pi, pi]. Throws for coincident points where the bearing
/// is undefined.
inline double azimuth(const GeoPoint& center, const GeoPoint& target) {
    const double dlambda = target.lambda - center.lambda;
    const double y = std::sin(dlambda) * std::cos(target.phi);
    const double x = std::cos(center.phi) * std::sin(target.phi) -
                     std::sin(center.phi) * std::cos(target.phi) * std::cos(dlambda);
    if (std::abs(y) < 1e-15 && std::abs(x) < 1e-15) {
        throw std::domain_error("azimuth: coincident or antipodal points");
    }
    return std::atan2(y, x);
}

/// Point reached by going `east_km`/`north_km` from `origin` on the small
/// flat-earth patch around it. Used to lay out meshes and toy geometries.
inline GeoPoint offset_km(const GeoPoint& origin, double east_km, double north_km) {
    const double dphi = north_km / kEarthRadiusKm;
    const double dlambda = east_km / (kEarthRadiusKm * std::cos(origin.phi));
    return GeoPoint{origin.phi + dphi, origin.lambda + dlambda};
}

}  // namespace stormrisk
