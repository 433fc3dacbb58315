#include "trackfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trackfuse/errors.hpp"

namespace trackfuse {

void FusionConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(watermark_delay)) throw ConfigError("fusion.watermark_delay must be positive");
    if (!positive(prediction_horizon))
        throw ConfigError("fusion.prediction_horizon must be positive");
    if (!positive(prediction_step)) throw ConfigError("fusion.prediction_step must be positive");
    if (prediction_step > prediction_horizon)
        throw ConfigError("fusion.prediction_step must not exceed the horizon");
    if (!positive(collision_distance))
        throw ConfigError("fusion.collision_distance must be positive");
}

FusionEngine::FusionEngine(const ReferenceOrigin& origin, const FusionConfig& fusion_cfg,
                           const FilterConfig& filter_cfg,
                           const AssociationConfig& assoc_cfg, std::uint64_t seed,
                           kernels::ExecMode mode)
    : origin_(origin),
      fusion_cfg_(fusion_cfg),
      store_(seed, filter_cfg, assoc_cfg, mode),
      clock_(-std::numeric_limits<double>::infinity()) {
    fusion_cfg_.validate();
}

IngestResult FusionEngine::ingest(const TrackletMessage& msg) {
    IngestResult r;
    std::lock_guard<std::mutex> lock(mutex_);
    stats_.messages_ingested += 1;
    clock_ = std::max(clock_, msg.sent_at);
    const double lateness_bound = clock_ - fusion_cfg_.watermark_delay;

    for (const TrackPoint& p : msg.tracklet.points) {
        if (p.t < lateness_bound) {
            r.late_dropped += 1;
            continue;
        }
        BufferKey key{p.t, msg.tracklet.camera_id, msg.tracklet.local_object_id};
        buffer_.emplace(std::move(key),
                        Pending{geo_to_enu(p.pos, origin_), msg.tracklet.class_label});
        r.accepted += 1;
    }
    stats_.points_accepted += r.accepted;
    stats_.points_late_dropped += r.late_dropped;
    return r;
}

std::vector<AppliedObservation> FusionEngine::advance() {
    // Snapshot the releasable prefix under the lock, then run association
    // and filtering outside it; producers keep ingesting meanwhile.
    std::vector<std::pair<double, Pending>> batch;
    double now = 0.0;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        now = clock_;
        const double watermark = clock_ - fusion_cfg_.watermark_delay;
        while (!buffer_.empty() && std::get<0>(buffer_.begin()->first) <= watermark) {
            auto node = buffer_.begin();
            batch.emplace_back(std::get<0>(node->first), node->second);
            buffer_.erase(node);
        }
    }

    std::vector<AppliedObservation> applied;
    applied.reserve(batch.size());
    std::int64_t degeneracy_events = 0;
    for (const auto& [t, pending] : batch) {
        const Observation obs{t, pending.pos};
        store_.advance_tracks_to(obs.t);
        const AssocDecision d = store_.associate(obs);
        bool degeneracy = false;
        const std::int64_t id = store_.apply(d, obs, pending.label, degeneracy);
        if (degeneracy) ++degeneracy_events;

        const Track* trk = store_.find(id);
        applied.push_back(AppliedObservation{id, obs.t, trk->filter.estimate(),
                                             !d.matched});
    }

    if (degeneracy_events > 0) {
        std::lock_guard<std::mutex> lock(mutex_);
        stats_.degeneracy_events += degeneracy_events;
    }
    if (std::isfinite(now)) store_.gc(now);
    return applied;
}

std::vector<AppliedObservation> FusionEngine::flush() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!buffer_.empty()) {
            const double newest = std::get<0>(buffer_.rbegin()->first);
            clock_ = std::max(clock_, newest + fusion_cfg_.watermark_delay);
        }
    }
    return advance();
}

double FusionEngine::clock() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return clock_;
}

EngineStats FusionEngine::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return stats_;
}

std::size_t FusionEngine::buffered() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return buffer_.size();
}

TrajectoryPrediction propagate_estimate(std::int64_t track_id, const KinematicState& est,
                                        double lead, double t0, const FusionConfig& cfg) {
    const int n_steps =
        static_cast<int>(std::floor(cfg.prediction_horizon / cfg.prediction_step + 1e-9));
    TrajectoryPrediction pred;
    pred.track_id = track_id;
    pred.points.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int j = 0; j <= n_steps; ++j) {
        const double ahead = lead + j * cfg.prediction_step;
        pred.points.emplace_back(t0 + j * cfg.prediction_step,
                                 EnuPoint{est.x_lon + est.dx_lon * ahead,
                                          est.x_lat + est.dx_lat * ahead});
    }
    return pred;
}

std::vector<CollisionAlert> detect_collisions(
    const std::vector<TrajectoryPrediction>& predictions, const FusionConfig& cfg) {
    std::vector<CollisionAlert> alerts;
    for (std::size_t a = 0; a < predictions.size(); ++a) {
        for (std::size_t b = a + 1; b < predictions.size(); ++b) {
            const auto& pa = predictions[a].points;
            const auto& pb = predictions[b].points;
            const std::size_t n = std::min(pa.size(), pb.size());
            double best_d = std::numeric_limits<double>::infinity();
            double best_t = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = enu_distance(pa[i].second, pb[i].second);
                if (d < best_d) { // strict: earliest instant wins ties
                    best_d = d;
                    best_t = pa[i].first;
                }
            }
            if (n > 0 && best_d <= cfg.collision_distance) {
                const std::int64_t ia = predictions[a].track_id;
                const std::int64_t ib = predictions[b].track_id;
                alerts.push_back(CollisionAlert{std::min(ia, ib), std::max(ia, ib),
                                                best_t, best_d});
            }
        }
    }
    return alerts;
}

std::vector<TrajectoryPrediction> FusionEngine::predict_trajectories() const {
    std::vector<TrajectoryPrediction> out;
    const double now = clock();
    if (!std::isfinite(now)) return out;
    for (const Track& trk : store_.tracks()) {
        if (trk.status != TrackStatus::confirmed) continue;
        out.push_back(propagate_estimate(trk.track_id, trk.filter.estimate(),
                                         now - trk.filter.last_time(), now, fusion_cfg_));
    }
    return out;
}

std::vector<CollisionAlert> FusionEngine::detect_collisions(
    const std::vector<TrajectoryPrediction>& predictions) const {
    return trackfuse::detect_collisions(predictions, fusion_cfg_);
}

} // namespace trackfuse
