#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trackfuse/events.hpp"

namespace trackfuse {

/// Everything scored about one run. Counter fields are nullopt when the
/// metrics were recomputed from streams that cannot recover them (e.g. lost
/// messages never reach any file). runtime_seconds is informational and is
/// never serialized: the written metrics file must be a pure function of the
/// recorded streams.
struct MetricsReport {
    std::map<std::int64_t, std::optional<double>> per_object_rmse; // by true object id
    std::optional<double> overall_rmse;
    std::int64_t tracks_created = 0;
    std::int64_t true_object_count = 0;
    std::int64_t track_count_error = 0; // tracks_created - true_object_count
    double alert_precision = 1.0;
    double alert_recall = 1.0;
    bool alert_precision_vacuous = true;
    bool alert_recall_vacuous = true;
    std::optional<std::int64_t> messages_sent;
    std::optional<std::int64_t> messages_delivered;
    std::optional<std::int64_t> points_late_dropped;
    double runtime_seconds = 0.0;

    /// Single-line JSON, key order fixed, byte-deterministic.
    std::string to_json_line() const;
};

struct MetricsOptions {
    double collision_distance = 2.5; // near-miss threshold on truth, m
    double alert_time_window = 3.0;  // |truth near-miss time - alert t| bound, s
    double align_tolerance = 0.05;   // track event to truth sample pairing, s
    double burn_in = 0.0;            // s after first truth sample to ignore
};

/// Track-to-truth assignment: greedy on mean distance over the track's
/// lifetime, each truth object claimed at most once. Index i gives the truth
/// object matched to the i-th distinct track id, or nullopt.
struct TrackMatching {
    std::vector<std::int64_t> track_ids; // distinct, ascending
    std::vector<std::optional<std::int64_t>> matched_truth;
};

TrackMatching match_tracks(const std::vector<sim::GroundTruthSample>& truth,
                           const std::vector<TrackEventLine>& tracks,
                           const MetricsOptions& opt);

/// Position RMSE, track counts, and alert precision/recall from recorded
/// streams. Pure: identical inputs give an identical report.
MetricsReport compute_metrics(const std::vector<sim::GroundTruthSample>& truth,
                              const EventStream& events, const MetricsOptions& opt);

} // namespace trackfuse
