#include "trackfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace trackfuse {

using ordered_json = nlohmann::ordered_json;

std::string MetricsReport::to_json_line() const {
    ordered_json j;
    ordered_json per;
    for (const auto& [id, rmse] : per_object_rmse) {
        if (rmse)
            per[std::to_string(id)] = *rmse;
        else
            per[std::to_string(id)] = nullptr;
    }
    j["per_object_rmse"] = std::move(per);
    if (overall_rmse)
        j["overall_rmse"] = *overall_rmse;
    else
        j["overall_rmse"] = nullptr;
    j["tracks_created"] = tracks_created;
    j["true_object_count"] = true_object_count;
    j["track_count_error"] = track_count_error;
    j["alert_precision"] = alert_precision;
    j["alert_recall"] = alert_recall;
    j["alert_precision_vacuous"] = alert_precision_vacuous;
    j["alert_recall_vacuous"] = alert_recall_vacuous;
    auto put_count = [&](const char* key, const std::optional<std::int64_t>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    put_count("messages_sent", messages_sent);
    put_count("messages_delivered", messages_delivered);
    put_count("points_late_dropped", points_late_dropped);
    return j.dump() + "\n";
}

namespace {

struct EnuSample {
    double t;
    EnuPoint pos;
};

// Nearest sample by time via binary search; nullopt outside the tolerance.
std::optional<std::size_t> nearest_in_time(const std::vector<EnuSample>& sorted, double t,
                                           double tolerance) {
    if (sorted.empty()) return std::nullopt;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), t,
                               [](const EnuSample& s, double v) { return s.t < v; });
    std::size_t best = sorted.size();
    double best_dt = tolerance;
    if (it != sorted.end() && std::abs(it->t - t) <= best_dt) {
        best = static_cast<std::size_t>(it - sorted.begin());
        best_dt = std::abs(it->t - t);
    }
    if (it != sorted.begin()) {
        auto prev = std::prev(it);
        if (std::abs(prev->t - t) <= best_dt) {
            best = static_cast<std::size_t>(prev - sorted.begin());
        }
    }
    if (best == sorted.size()) return std::nullopt;
    return best;
}

struct Series {
    std::int64_t id;
    std::vector<EnuSample> samples; // time-sorted
};

std::vector<Series> group_truth(const std::vector<sim::GroundTruthSample>& truth,
                                const ReferenceOrigin& origin) {
    std::map<std::int64_t, std::vector<EnuSample>> by_id;
    for (const auto& s : truth)
        by_id[s.object_id].push_back(EnuSample{s.t, geo_to_enu(s.pos, origin)});
    std::vector<Series> out;
    for (auto& [id, samples] : by_id) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const EnuSample& a, const EnuSample& b) { return a.t < b.t; });
        out.push_back(Series{id, std::move(samples)});
    }
    return out;
}

std::vector<Series> group_tracks(const std::vector<TrackEventLine>& tracks,
                                 const ReferenceOrigin& origin, double t_min) {
    std::map<std::int64_t, std::vector<EnuSample>> by_id;
    for (const auto& e : tracks) {
        if (e.t < t_min) continue;
        by_id[e.id].push_back(EnuSample{e.t, geo_to_enu(e.pos, origin)});
    }
    std::vector<Series> out;
    for (auto& [id, samples] : by_id) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const EnuSample& a, const EnuSample& b) { return a.t < b.t; });
        out.push_back(Series{id, std::move(samples)});
    }
    return out;
}

} // namespace

TrackMatching match_tracks(const std::vector<sim::GroundTruthSample>& truth,
                           const std::vector<TrackEventLine>& tracks,
                           const MetricsOptions& opt) {
    TrackMatching m;
    if (truth.empty()) {
        std::set<std::int64_t> ids;
        for (const auto& e : tracks) ids.insert(e.id);
        m.track_ids.assign(ids.begin(), ids.end());
        m.matched_truth.assign(m.track_ids.size(), std::nullopt);
        return m;
    }

    const ReferenceOrigin origin{truth.front().pos};
    double t0 = std::numeric_limits<double>::infinity();
    for (const auto& s : truth) t0 = std::min(t0, s.t);

    const std::vector<Series> truth_series = group_truth(truth, origin);
    const std::vector<Series> track_series = group_tracks(tracks, origin, t0 + opt.burn_in);

    // All tracks appear in the matching, even those whose events fall
    // entirely inside the burn-in window.
    std::set<std::int64_t> all_ids;
    for (const auto& e : tracks) all_ids.insert(e.id);
    m.track_ids.assign(all_ids.begin(), all_ids.end());
    m.matched_truth.assign(m.track_ids.size(), std::nullopt);

    struct Candidate {
        double mean_dist;
        std::size_t track_idx; // into m.track_ids
        std::size_t truth_idx; // into truth_series
    };
    std::vector<Candidate> candidates;
    for (const Series& trk : track_series) {
        const std::size_t track_idx = static_cast<std::size_t>(
            std::lower_bound(m.track_ids.begin(), m.track_ids.end(), trk.id) -
            m.track_ids.begin());
        for (std::size_t ti = 0; ti < truth_series.size(); ++ti) {
            double sum = 0.0;
            int n = 0;
            for (const EnuSample& s : trk.samples) {
                auto near = nearest_in_time(truth_series[ti].samples, s.t, opt.align_tolerance);
                if (!near) continue;
                sum += enu_distance(s.pos, truth_series[ti].samples[*near].pos);
                n += 1;
            }
            if (n > 0) candidates.push_back(Candidate{sum / n, track_idx, ti});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.mean_dist != b.mean_dist) return a.mean_dist < b.mean_dist;
        if (a.track_idx != b.track_idx) return a.track_idx < b.track_idx;
        return a.truth_idx < b.truth_idx;
    });

    std::vector<bool> truth_taken(truth_series.size(), false);
    for (const Candidate& c : candidates) {
        if (m.matched_truth[c.track_idx] || truth_taken[c.truth_idx]) continue;
        m.matched_truth[c.track_idx] = truth_series[c.truth_idx].id;
        truth_taken[c.truth_idx] = true;
    }
    return m;
}

MetricsReport compute_metrics(const std::vector<sim::GroundTruthSample>& truth,
                              const EventStream& events, const MetricsOptions& opt) {
    MetricsReport report;

    std::set<std::int64_t> truth_ids;
    for (const auto& s : truth) truth_ids.insert(s.object_id);
    std::set<std::int64_t> track_ids;
    for (const auto& e : events.tracks) track_ids.insert(e.id);

    report.true_object_count = static_cast<std::int64_t>(truth_ids.size());
    report.tracks_created = static_cast<std::int64_t>(track_ids.size());
    report.track_count_error = report.tracks_created - report.true_object_count;
    for (std::int64_t id : truth_ids) report.per_object_rmse[id] = std::nullopt;
    if (truth.empty()) return report;

    const ReferenceOrigin origin{truth.front().pos};
    double t0 = std::numeric_limits<double>::infinity();
    for (const auto& s : truth) t0 = std::min(t0, s.t);

    const TrackMatching matching = match_tracks(truth, events.tracks, opt);
    const std::vector<Series> truth_series = group_truth(truth, origin);
    const std::vector<Series> track_series =
        group_tracks(events.tracks, origin, t0 + opt.burn_in);

    // Track id -> matched truth id.
    std::map<std::int64_t, std::int64_t> track_to_truth;
    for (std::size_t i = 0; i < matching.track_ids.size(); ++i)
        if (matching.matched_truth[i])
            track_to_truth[matching.track_ids[i]] = *matching.matched_truth[i];

    double pooled_sq = 0.0;
    std::int64_t pooled_n = 0;
    for (const Series& trk : track_series) {
        auto it = track_to_truth.find(trk.id);
        if (it == track_to_truth.end()) continue;
        const Series* ts = nullptr;
        for (const Series& s : truth_series)
            if (s.id == it->second) ts = &s;
        double sq = 0.0;
        std::int64_t n = 0;
        for (const EnuSample& s : trk.samples) {
            auto near = nearest_in_time(ts->samples, s.t, opt.align_tolerance);
            if (!near) continue;
            const double d = enu_distance(s.pos, ts->samples[*near].pos);
            sq += d * d;
            n += 1;
        }
        if (n > 0) {
            report.per_object_rmse[it->second] = std::sqrt(sq / static_cast<double>(n));
            pooled_sq += sq;
            pooled_n += n;
        }
    }
    if (pooled_n > 0)
        report.overall_rmse = std::sqrt(pooled_sq / static_cast<double>(pooled_n));

    // Ground-truth near-misses: unordered object pairs that actually come
    // within collision_distance at some shared truth sample instant.
    std::map<double, std::vector<std::pair<std::int64_t, EnuPoint>>> truth_by_time;
    for (const auto& s : truth)
        truth_by_time[s.t].emplace_back(s.object_id, geo_to_enu(s.pos, origin));
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<double>> near_miss_times;
    for (const auto& [t, objs] : truth_by_time) {
        for (std::size_t i = 0; i < objs.size(); ++i) {
            for (std::size_t j = i + 1; j < objs.size(); ++j) {
                if (enu_distance(objs[i].second, objs[j].second) > opt.collision_distance)
                    continue;
                auto key = std::minmax(objs[i].first, objs[j].first);
                near_miss_times[{key.first, key.second}].push_back(t);
            }
        }
    }

    std::int64_t true_positives = 0;
    std::set<std::pair<std::int64_t, std::int64_t>> covered;
    for (const AlertLine& alert : events.alerts) {
        bool tp = false;
        auto ia = track_to_truth.find(alert.a);
        auto ib = track_to_truth.find(alert.b);
        if (ia != track_to_truth.end() && ib != track_to_truth.end() &&
            ia->second != ib->second) {
            auto key = std::minmax(ia->second, ib->second);
            auto nm = near_miss_times.find({key.first, key.second});
            if (nm != near_miss_times.end()) {
                for (double t : nm->second) {
                    if (std::abs(t - alert.t) <= opt.alert_time_window) {
                        tp = true;
                        break;
                    }
                }
            }
            if (tp) covered.insert({key.first, key.second});
        }
        if (tp) true_positives += 1;
    }

    if (!events.alerts.empty()) {
        report.alert_precision =
            static_cast<double>(true_positives) / static_cast<double>(events.alerts.size());
        report.alert_precision_vacuous = false;
    }
    if (!near_miss_times.empty()) {
        report.alert_recall = static_cast<double>(covered.size()) /
                              static_cast<double>(near_miss_times.size());
        report.alert_recall_vacuous = false;
    }
    return report;
}

} // namespace trackfuse
