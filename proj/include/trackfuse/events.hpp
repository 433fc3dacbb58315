#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trackfuse/fusion.hpp"
#include "trackfuse/simulator.hpp"

namespace trackfuse {

/// One line of the fused track-state stream, geodetic frame.
struct TrackEventLine {
    std::int64_t id = 0;
    double t = 0.0;
    GeoPoint pos;
    double vn = 0.0;
    double ve = 0.0;
};

struct AlertLine {
    std::int64_t a = 0;
    std::int64_t b = 0;
    double t = 0.0;
    double d = 0.0;
};

// Canonical single-line encodings, line-feed terminated.
std::string encode_truth_line(const sim::GroundTruthSample& s);
std::string encode_track_line(const TrackEventLine& e);
std::string encode_alert_line(const AlertLine& a);

TrackEventLine to_track_line(const AppliedObservation& a, const ReferenceOrigin& origin);
AlertLine to_alert_line(const CollisionAlert& c);

/// Parse a whole truth file; non-truth lines are rejected.
std::vector<sim::GroundTruthSample> parse_truth_lines(std::string_view text);

struct EventStream {
    std::vector<TrackEventLine> tracks;
    std::vector<AlertLine> alerts;
};

/// Parse an event file containing interleaved "track" and "alert" lines.
EventStream parse_event_lines(std::string_view text);

} // namespace trackfuse
