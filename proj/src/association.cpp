#include "trackfuse/association.hpp"

#include <cmath>
#include <limits>

#include "trackfuse/errors.hpp"

namespace trackfuse {

void AssociationConfig::validate() const {
    if (!(std::isfinite(gate_radius) && gate_radius > 0.0))
        throw ConfigError("association.gate_radius must be positive");
    if (confirm_after <= 0) throw ConfigError("association.confirm_after must be positive");
    if (!(std::isfinite(stale_after) && stale_after > 0.0))
        throw ConfigError("association.stale_after must be positive");
}

ClassLabel Track::voted_class() const {
    int best = -1;
    int best_count = 0;
    bool tie = false;
    for (int i = 0; i < static_cast<int>(class_votes.size()); ++i) {
        if (class_votes[i] > best_count) {
            best = i;
            best_count = class_votes[i];
            tie = false;
        } else if (class_votes[i] == best_count && best_count > 0) {
            tie = true;
        }
    }
    if (best < 0 || tie) return ClassLabel::unknown;
    return static_cast<ClassLabel>(best);
}

TrackStore::TrackStore(std::uint64_t seed, FilterConfig filter_cfg,
                       AssociationConfig assoc_cfg, kernels::ExecMode mode)
    : seed_(seed), filter_cfg_(filter_cfg), assoc_cfg_(assoc_cfg), mode_(mode) {
    filter_cfg_.validate();
    assoc_cfg_.validate();
}

bool TrackStore::eligible(const Track& t, double t_now) const {
    return t.status != TrackStatus::retired &&
           t_now - t.last_obs_time <= assoc_cfg_.stale_after;
}

void TrackStore::advance_tracks_to(double t) {
    for (Track& trk : tracks_)
        if (eligible(trk, t)) trk.filter.predict(t, trk.rng);
}

AssocDecision TrackStore::associate(const Observation& obs) const {
    AssocDecision best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const Track& trk : tracks_) {
        if (!eligible(trk, obs.t)) continue;
        const double d = enu_distance(position_of(trk.filter.estimate()), obs.pos);
        if (d > assoc_cfg_.gate_radius) continue;
        if (d < best_dist || (d == best_dist && trk.track_id < best.track_id)) {
            best = AssocDecision{true, trk.track_id, d};
            best_dist = d;
        }
    }
    return best;
}

std::int64_t TrackStore::apply(const AssocDecision& d, const Observation& obs,
                               ClassLabel label, bool& degeneracy) {
    degeneracy = false;
    if (d.matched) {
        for (Track& trk : tracks_) {
            if (trk.track_id != d.track_id) continue;
            degeneracy = trk.filter.step(obs, trk.rng);
            trk.obs_count += 1;
            trk.last_obs_time = obs.t;
            trk.class_votes[static_cast<std::size_t>(label)] += 1;
            if (trk.status == TrackStatus::tentative &&
                trk.obs_count >= assoc_cfg_.confirm_after)
                trk.status = TrackStatus::confirmed;
            return trk.track_id;
        }
        throw TimeError("decision references unknown track id " +
                        std::to_string(d.track_id));
    }

    const std::int64_t id = next_id_++;
    RngStream rng(mix_seed(seed_, static_cast<std::uint64_t>(id)));
    ParticleFilter filter(obs, filter_cfg_, rng, mode_);
    Track trk{id, std::move(filter), rng, obs.t, 1, {}, TrackStatus::tentative};
    trk.class_votes[static_cast<std::size_t>(label)] = 1;
    if (assoc_cfg_.confirm_after <= 1) trk.status = TrackStatus::confirmed;
    tracks_.push_back(std::move(trk));
    return id;
}

std::vector<std::int64_t> TrackStore::gc(double now) {
    std::vector<std::int64_t> retired;
    for (Track& trk : tracks_) {
        if (trk.status == TrackStatus::retired) continue;
        if (now - trk.last_obs_time > assoc_cfg_.stale_after) {
            trk.status = TrackStatus::retired;
            retired.push_back(trk.track_id);
        }
    }
    return retired;
}

const Track* TrackStore::find(std::int64_t id) const {
    for (const Track& trk : tracks_)
        if (trk.track_id == id) return &trk;
    return nullptr;
}

} // namespace trackfuse
