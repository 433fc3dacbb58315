#pragma once

#include "trackfuse/geo.hpp"

namespace trackfuse {

/// Planar constant-velocity state in the local tangent plane. x_lat/x_lon
/// keep the historical field names; they are meters north / meters east,
/// with dx_* the matching velocities in m/s.
struct KinematicState {
    double x_lat = 0.0;  // north, m
    double dx_lat = 0.0; // north velocity, m/s
    double x_lon = 0.0;  // east, m
    double dx_lon = 0.0; // east velocity, m/s
};

/// One weighted hypothesis of a filter.
struct Particle {
    KinematicState state;
    double weight = 0.0;
};

/// Position measurement in the working frame.
struct Observation {
    double t = 0.0;
    EnuPoint pos;
};

inline EnuPoint position_of(const KinematicState& s) {
    return EnuPoint{s.x_lon, s.x_lat};
}

} // namespace trackfuse
