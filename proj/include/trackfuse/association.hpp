#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trackfuse/filter.hpp"
#include "trackfuse/tracklet.hpp"

namespace trackfuse {

struct AssociationConfig {
    double gate_radius = 10.0; // m
    int confirm_after = 3;     // observations
    double stale_after = 3.0;  // s without an observation

    void validate() const;
};

enum class TrackStatus { tentative, confirmed, retired };

/// A fused object: one particle filter plus lifecycle bookkeeping. Each track
/// owns a private random stream derived from the store seed and its id, so
/// stepping one track never perturbs another.
struct Track {
    std::int64_t track_id = 0;
    ParticleFilter filter;
    RngStream rng;
    double last_obs_time = 0.0;
    int obs_count = 0;
    std::array<int, 4> class_votes{}; // indexed by ClassLabel
    TrackStatus status = TrackStatus::tentative;

    /// Majority class across contributing observations; ties give unknown.
    ClassLabel voted_class() const;
};

struct AssocDecision {
    bool matched = false;      // false -> spawn a new track
    std::int64_t track_id = -1;
    double distance = 0.0;
};

/// Live track collection with a single logical writer. Association is pure
/// geometry: camera and per-camera object ids never enter any decision here.
class TrackStore {
public:
    TrackStore(std::uint64_t seed, FilterConfig filter_cfg, AssociationConfig assoc_cfg,
               kernels::ExecMode mode = kernels::ExecMode::parallel);

    /// A track takes part in gating while it is not retired and its last
    /// observation is no older than stale_after at time t. This rule is a
    /// pure function of the applied observation sequence, so association
    /// outcomes do not depend on when gc() happens to run.
    bool eligible(const Track& t, double t_now) const;

    /// Predict every eligible track to t (ascending track id). Must be called
    /// before gating observations at t.
    void advance_tracks_to(double t);

    /// Nearest eligible track within the gate; ties prefer the smaller
    /// distance, then the smaller track id.
    AssocDecision associate(const Observation& obs) const;

    /// Apply a decision: step the matched track's filter (promoting
    /// tentative -> confirmed at confirm_after observations) or spawn a new
    /// tentative track. Returns the touched track id; sets degeneracy when
    /// the filter update underflowed.
    std::int64_t apply(const AssocDecision& d, const Observation& obs,
                       ClassLabel label, bool& degeneracy);

    /// Retire every track idle longer than stale_after; returns the newly
    /// retired ids.
    std::vector<std::int64_t> gc(double now);

    const std::vector<Track>& tracks() const { return tracks_; }
    const Track* find(std::int64_t id) const;
    std::int64_t tracks_created() const { return next_id_; }

private:
    std::uint64_t seed_;
    FilterConfig filter_cfg_;
    AssociationConfig assoc_cfg_;
    kernels::ExecMode mode_;
    std::int64_t next_id_ = 0;
    std::vector<Track> tracks_;
};

} // namespace trackfuse
