#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trackfuse/geo.hpp"
#include "trackfuse/random.hpp"
#include "trackfuse/tracklet.hpp"

namespace trackfuse::sim {

struct ConstantVelocityMotion {
    double vn = 0.0; // m/s north
    double ve = 0.0; // m/s east
};

/// Piecewise-linear path through timed geodetic waypoints.
struct WaypointMotion {
    std::vector<std::pair<double, GeoPoint>> points;
};

struct ObjectSpec {
    std::int64_t object_id = 0;
    ClassLabel class_label = ClassLabel::vehicle;
    GeoPoint initial_position;
    std::variant<ConstantVelocityMotion, WaypointMotion> motion;
};

struct CameraSpec {
    std::string camera_id;
    GeoPoint position;
    double range = 100.0;       // m
    double frame_period = 0.1;  // s
    double p_detect = 1.0;
    double meas_noise_std = 0.0; // m per ENU axis
    std::optional<std::int64_t> mounted_on; // carrier object id
};

/// Delay/loss stand-in for the radio link: fixed base latency plus folded
/// Gaussian jitter, independent Bernoulli loss.
struct ChannelSpec {
    double base_latency = 0.05; // s
    double jitter_std = 0.02;   // s
    double loss_prob = 0.01;
};

struct ScenarioConfig {
    double duration = 0.0; // s
    ReferenceOrigin origin;
    std::vector<ObjectSpec> objects;
    std::vector<CameraSpec> cameras;
    ChannelSpec channel;
    std::uint64_t seed = 0;

    void validate() const;
    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);
};

struct GroundTruthSample {
    double t = 0.0;
    std::int64_t object_id = 0;
    GeoPoint pos;
    double vn = 0.0;
    double ve = 0.0;
};

struct TruthState {
    EnuPoint pos;
    double vn = 0.0;
    double ve = 0.0;
};

struct DeliveredMessage {
    double delivery_time = 0.0;
    TrackletMessage msg;
    std::int64_t true_object_id = 0; // provenance, for metrics only
};

struct ScenarioRun {
    std::vector<GroundTruthSample> truth; // fixed 0.1 s grid
    std::vector<DeliveredMessage> messages; // sorted by delivery time
    std::int64_t points_generated = 0; // detections before channel loss
};

inline constexpr double kTruthSamplePeriod = 0.1;
inline constexpr double kMaxObjectSpeed = 60.0; // m/s sanity bound

/// True ENU state of an object at time t. Waypoint motion is linear between
/// waypoints with segment-constant velocity; t outside the waypoint span is
/// an error.
TruthState truth_at(const ObjectSpec& obj, double t, const ReferenceOrigin& origin);

/// One detection attempt: in range and past the Bernoulli(p_detect) draw,
/// the reported position is the truth plus per-axis Gaussian noise.
std::optional<TrackPoint> camera_observe(const CameraSpec& cam, const EnuPoint& cam_pos,
                                         const EnuPoint& obj_pos, double t,
                                         RngStream& rng, const ReferenceOrigin& origin);

/// Delivery time for a send, or nullopt when the channel drops it. Jitter is
/// the absolute value of a Gaussian, so delivery never precedes
/// send + base_latency.
std::optional<double> channel_deliver(double send_t, const ChannelSpec& spec,
                                      RngStream& rng);

/// Generate the whole scenario: per-frame detections wrapped as single-point
/// tracklets, scheduled through the channel, plus the ground-truth stream.
/// Deterministic for a fixed config.
ScenarioRun run_scenario(const ScenarioConfig& cfg);

} // namespace trackfuse::sim
