#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "trackfuse/association.hpp"
#include "trackfuse/filter.hpp"
#include "trackfuse/tracklet.hpp"

namespace trackfuse {

struct FusionConfig {
    double watermark_delay = 0.5;     // s of tolerated lateness
    double prediction_horizon = 3.0;  // s
    double prediction_step = 0.25;    // s
    double collision_distance = 2.5;  // m

    void validate() const;
};

/// Deterministic forward propagation of one confirmed track's estimate.
struct TrajectoryPrediction {
    std::int64_t track_id = 0;
    std::vector<std::pair<double, EnuPoint>> points; // (t, position)
};

/// Predicted pairwise near-miss. track_a < track_b.
struct CollisionAlert {
    std::int64_t track_a = 0;
    std::int64_t track_b = 0;
    double t_closest = 0.0;
    double min_distance = 0.0;
};

struct IngestResult {
    int accepted = 0;
    int late_dropped = 0;
};

/// One observation applied to the track store, with the post-update estimate.
struct AppliedObservation {
    std::int64_t track_id = 0;
    double t = 0.0;
    KinematicState estimate;
    bool spawned = false;
};

struct EngineStats {
    std::int64_t messages_ingested = 0;
    std::int64_t points_accepted = 0;
    std::int64_t points_late_dropped = 0;
    std::int64_t degeneracy_events = 0;
};

/// Propagate a state estimate ballistically (constant velocity, zero noise)
/// onto the grid t0, t0+step, ..., t0+horizon. `lead` is how far the
/// estimate already lags behind t0.
TrajectoryPrediction propagate_estimate(std::int64_t track_id, const KinematicState& est,
                                        double lead, double t0, const FusionConfig& cfg);

/// All-pairs minimum separation over a shared grid; one alert per unordered
/// pair whose minimum is at or below cfg.collision_distance. Distance ties
/// resolve to the earliest grid instant.
std::vector<CollisionAlert> detect_collisions(
    const std::vector<TrajectoryPrediction>& predictions, const FusionConfig& cfg);

/// The edge service: buffers incoming tracklet points, restores event-time
/// order within a watermark, and drives association + filtering. Points
/// older than (clock - watermark_delay) on arrival are dropped, never
/// retro-applied. The drain order (t, camera_id, object_id) is total, so any
/// arrival permutation that stays within the lateness bound produces the
/// same fused state. Ordering is the only use fusion makes of source ids.
///
/// Threading: ingest may be called from any number of producer threads; the
/// buffer insert is the synchronized section. advance, flush, and the
/// prediction queries belong to a single consumer and must not overlap each
/// other.
class FusionEngine {
public:
    FusionEngine(const ReferenceOrigin& origin, const FusionConfig& fusion_cfg,
                 const FilterConfig& filter_cfg, const AssociationConfig& assoc_cfg,
                 std::uint64_t seed,
                 kernels::ExecMode mode = kernels::ExecMode::parallel);

    /// Buffer a validated message's points; advances the engine clock to the
    /// message's send time. Late points are counted, not errors.
    IngestResult ingest(const TrackletMessage& msg);

    /// Release every buffered observation at or before clock - watermark,
    /// in total order, through association and filtering; then retire stale
    /// tracks. Returns the applied observations.
    std::vector<AppliedObservation> advance();

    /// Raise the watermark past every buffered point and drain. Call once at
    /// end of stream.
    std::vector<AppliedObservation> flush();

    /// Constant-velocity propagation of each confirmed track's estimate from
    /// the engine clock out to the prediction horizon, on a shared grid.
    std::vector<TrajectoryPrediction> predict_trajectories() const;

    /// Minimum pairwise separation over the shared grid; one alert per
    /// unordered pair at or below the collision distance. Ties on distance
    /// take the earliest grid instant.
    std::vector<CollisionAlert> detect_collisions(
        const std::vector<TrajectoryPrediction>& predictions) const;

    double clock() const;
    EngineStats stats() const;
    const TrackStore& store() const { return store_; }
    const ReferenceOrigin& origin() const { return origin_; }
    const FusionConfig& config() const { return fusion_cfg_; }
    std::size_t buffered() const;

private:
    // (t, camera_id, local_object_id): a total order over simultaneous
    // observations, so drains are identical run to run.
    using BufferKey = std::tuple<double, std::string, std::int64_t>;
    struct Pending {
        EnuPoint pos;
        ClassLabel label;
    };

    ReferenceOrigin origin_;
    FusionConfig fusion_cfg_;
    TrackStore store_;
    mutable std::mutex mutex_; // guards buffer_, clock_, stats_
    std::multimap<BufferKey, Pending> buffer_;
    double clock_;
    EngineStats stats_;
};

} // namespace trackfuse
