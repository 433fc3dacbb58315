#pragma once

#include <cmath>

#include "trackfuse/errors.hpp"

namespace trackfuse {

/// Geodetic position, degrees. lat in [-90, 90], lon in [-180, 180).
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

/// Local tangent-plane position, meters east/north of a reference origin.
struct EnuPoint {
    double east = 0.0;
    double north = 0.0;
};

/// Anchor of the local tangent plane all filtering distances live in.
struct ReferenceOrigin {
    GeoPoint origin;
};

inline constexpr double kEarthRadiusMeters = 6371000.0;
inline constexpr double kDegToRad = M_PI / 180.0;

/// Meters per degree of latitude on the spherical earth model.
inline constexpr double kMetersPerDegree = kEarthRadiusMeters * M_PI / 180.0;

inline bool geo_point_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) &&
           p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon < 180.0;
}

/// Equirectangular projection onto the tangent plane at ref. Exact inverse of
/// enu_to_geo; adequate below ~10 km extents.
inline EnuPoint geo_to_enu(const GeoPoint& p, const ReferenceOrigin& ref) {
    const double scale = std::cos(ref.origin.lat * kDegToRad);
    return EnuPoint{
        (p.lon - ref.origin.lon) * kMetersPerDegree * scale,
        (p.lat - ref.origin.lat) * kMetersPerDegree,
    };
}

inline GeoPoint enu_to_geo(const EnuPoint& p, const ReferenceOrigin& ref) {
    if (std::abs(ref.origin.lat) >= 89.0)
        throw ConfigError("reference origin too close to a pole (|lat| >= 89)");
    const double scale = std::cos(ref.origin.lat * kDegToRad);
    return GeoPoint{
        ref.origin.lat + p.north / kMetersPerDegree,
        ref.origin.lon + p.east / (kMetersPerDegree * scale),
    };
}

inline double enu_distance(const EnuPoint& a, const EnuPoint& b) {
    const double de = a.east - b.east;
    const double dn = a.north - b.north;
    return std::sqrt(de * de + dn * dn);
}

} // namespace trackfuse
