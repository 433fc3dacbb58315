#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trackfuse/geo.hpp"

namespace trackfuse {

enum class ClassLabel { vehicle, pedestrian, camera, unknown };

std::string_view to_string(ClassLabel c);
std::optional<ClassLabel> class_from_string(std::string_view s);

/// One time-stamped geodetic sample of a detected object.
struct TrackPoint {
    double t = 0.0; // scenario clock, seconds
    GeoPoint pos;
};

/// A single camera's detection sequence for one object.
struct Tracklet {
    std::string camera_id;
    std::int64_t local_object_id = 0;
    ClassLabel class_label = ClassLabel::unknown;
    std::vector<TrackPoint> points;
};

/// Wire envelope: a tracklet plus its send timestamp. schema_version is
/// pinned to 1; decoders reject anything else.
struct TrackletMessage {
    int schema_version = 1;
    double sent_at = 0.0;
    Tracklet tracklet;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr double kMaxTrackletSpanMeters = 100000.0;

/// Full list of invariant violations; empty means the tracklet is valid.
std::vector<std::string> tracklet_violations(const Tracklet& t);
std::vector<std::string> message_violations(const TrackletMessage& m);

/// Canonical single-line JSON encoding, line-feed terminated. Deterministic:
/// the same message always yields identical bytes.
std::string encode_message(const TrackletMessage& m);

/// Inverse of encode_message. Accepts any key order; throws DecodeError on
/// malformed syntax, unknown schema version, or invariant violations.
TrackletMessage decode_message(std::string_view line);

} // namespace trackfuse
