#include "trackfuse/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "trackfuse/errors.hpp"

namespace trackfuse::sim {

using nlohmann::json;

namespace {

double motion_end_time(const ObjectSpec& obj) {
    if (const auto* wp = std::get_if<WaypointMotion>(&obj.motion))
        return wp->points.back().first;
    return std::numeric_limits<double>::infinity();
}

double motion_start_time(const ObjectSpec& obj) {
    if (const auto* wp = std::get_if<WaypointMotion>(&obj.motion))
        return wp->points.front().first;
    return -std::numeric_limits<double>::infinity();
}

} // namespace

void ScenarioConfig::validate() const {
    if (!(std::isfinite(duration) && duration > 0.0))
        throw ConfigError("scenario duration must be positive");
    if (!geo_point_valid(origin.origin)) throw ConfigError("scenario origin out of range");
    if (std::abs(origin.origin.lat) >= 89.0)
        throw ConfigError("scenario origin too close to a pole");
    if (objects.empty()) throw ConfigError("scenario needs at least one object");
    if (cameras.empty()) throw ConfigError("scenario needs at least one camera");

    for (const ObjectSpec& o : objects) {
        if (!geo_point_valid(o.initial_position))
            throw ConfigError("object initial position out of range");
        if (const auto* cv = std::get_if<ConstantVelocityMotion>(&o.motion)) {
            if (std::hypot(cv->vn, cv->ve) > kMaxObjectSpeed)
                throw ConfigError("object speed exceeds sanity bound");
        } else {
            const auto& wp = std::get<WaypointMotion>(o.motion);
            if (wp.points.size() < 2) throw ConfigError("waypoint motion needs >= 2 points");
            for (std::size_t i = 0; i < wp.points.size(); ++i) {
                if (!geo_point_valid(wp.points[i].second))
                    throw ConfigError("waypoint out of range");
                if (i > 0 && !(wp.points[i].first > wp.points[i - 1].first))
                    throw ConfigError("waypoint times must be strictly increasing");
            }
            if (motion_start_time(o) > 0.0 || motion_end_time(o) < duration)
                throw ConfigError("waypoint span must cover [0, duration]");
        }
    }

    for (const CameraSpec& c : cameras) {
        if (c.camera_id.empty()) throw ConfigError("camera_id must be non-empty");
        if (!(c.range > 0.0)) throw ConfigError("camera range must be positive");
        if (!(c.frame_period > 0.0)) throw ConfigError("camera frame_period must be positive");
        if (!(c.p_detect >= 0.0 && c.p_detect <= 1.0))
            throw ConfigError("camera p_detect must be in [0, 1]");
        if (!(c.meas_noise_std >= 0.0))
            throw ConfigError("camera meas_noise_std must be non-negative");
        if (!geo_point_valid(c.position)) throw ConfigError("camera position out of range");
        if (c.mounted_on) {
            const bool known = std::any_of(objects.begin(), objects.end(),
                                           [&](const ObjectSpec& o) {
                                               return o.object_id == *c.mounted_on;
                                           });
            if (!known) throw ConfigError("camera mounted_on references unknown object");
        }
    }

    if (!(channel.base_latency >= 0.0)) throw ConfigError("channel base_latency must be >= 0");
    if (!(channel.jitter_std >= 0.0)) throw ConfigError("channel jitter_std must be >= 0");
    if (!(channel.loss_prob >= 0.0 && channel.loss_prob <= 1.0))
        throw ConfigError("channel loss_prob must be in [0, 1]");
}

namespace {

GeoPoint parse_geo(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("lat") || !j.contains("lon"))
        throw ConfigError(std::string(what) + " must be {\"lat\":..,\"lon\":..}");
    return GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
}

} // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario config: ") + e.what());
    }

    ScenarioConfig cfg;
    try {
        cfg.duration = j.at("duration").get<double>();
        cfg.origin.origin = parse_geo(j.at("origin"), "origin");
        cfg.seed = j.value("seed", std::uint64_t{0});

        for (const json& jo : j.at("objects")) {
            ObjectSpec o;
            o.object_id = jo.at("object_id").get<std::int64_t>();
            if (jo.contains("class_label")) {
                auto label = class_from_string(jo.at("class_label").get<std::string>());
                if (!label) throw ConfigError("unknown class_label");
                o.class_label = *label;
            }
            o.initial_position = parse_geo(jo.at("initial_position"), "initial_position");
            const json& jm = jo.at("motion");
            const std::string type = jm.at("type").get<std::string>();
            if (type == "constant_velocity") {
                o.motion = ConstantVelocityMotion{jm.at("vn").get<double>(),
                                                  jm.at("ve").get<double>()};
            } else if (type == "waypoints") {
                WaypointMotion wp;
                for (const json& jp : jm.at("points"))
                    wp.points.emplace_back(jp.at("t").get<double>(), parse_geo(jp, "waypoint"));
                o.motion = std::move(wp);
            } else {
                throw ConfigError("motion type must be constant_velocity or waypoints");
            }
            cfg.objects.push_back(std::move(o));
        }

        for (const json& jc : j.at("cameras")) {
            CameraSpec c;
            c.camera_id = jc.at("camera_id").get<std::string>();
            c.position = parse_geo(jc.at("position"), "camera position");
            c.range = jc.at("range").get<double>();
            c.frame_period = jc.at("frame_period").get<double>();
            c.p_detect = jc.value("p_detect", 1.0);
            c.meas_noise_std = jc.value("meas_noise_std", 0.0);
            if (jc.contains("mounted_on") && !jc.at("mounted_on").is_null())
                c.mounted_on = jc.at("mounted_on").get<std::int64_t>();
            cfg.cameras.push_back(std::move(c));
        }

        if (j.contains("channel")) {
            const json& ch = j.at("channel");
            cfg.channel.base_latency = ch.value("base_latency", cfg.channel.base_latency);
            cfg.channel.jitter_std = ch.value("jitter_std", cfg.channel.jitter_std);
            cfg.channel.loss_prob = ch.value("loss_prob", cfg.channel.loss_prob);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario config field error: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

TruthState truth_at(const ObjectSpec& obj, double t, const ReferenceOrigin& origin) {
    if (const auto* cv = std::get_if<ConstantVelocityMotion>(&obj.motion)) {
        const EnuPoint start = geo_to_enu(obj.initial_position, origin);
        return TruthState{EnuPoint{start.east + cv->ve * t, start.north + cv->vn * t},
                          cv->vn, cv->ve};
    }

    const auto& wp = std::get<WaypointMotion>(obj.motion).points;
    if (t < wp.front().first || t > wp.back().first)
        throw TimeError("time outside waypoint span");
    std::size_t seg = 0;
    while (seg + 2 < wp.size() && t > wp[seg + 1].first) ++seg;
    const auto& [t0, g0] = wp[seg];
    const auto& [t1, g1] = wp[seg + 1];
    const EnuPoint a = geo_to_enu(g0, origin);
    const EnuPoint b = geo_to_enu(g1, origin);
    const double dt = t1 - t0;
    const double f = (t - t0) / dt;
    return TruthState{EnuPoint{a.east + (b.east - a.east) * f,
                               a.north + (b.north - a.north) * f},
                      (b.north - a.north) / dt, (b.east - a.east) / dt};
}

std::optional<TrackPoint> camera_observe(const CameraSpec& cam, const EnuPoint& cam_pos,
                                         const EnuPoint& obj_pos, double t,
                                         RngStream& rng, const ReferenceOrigin& origin) {
    if (enu_distance(cam_pos, obj_pos) > cam.range) return std::nullopt;
    if (rng.next_unit() >= cam.p_detect) return std::nullopt;
    const EnuPoint noisy{obj_pos.east + cam.meas_noise_std * rng.next_normal(),
                         obj_pos.north + cam.meas_noise_std * rng.next_normal()};
    return TrackPoint{t, enu_to_geo(noisy, origin)};
}

std::optional<double> channel_deliver(double send_t, const ChannelSpec& spec,
                                      RngStream& rng) {
    if (rng.next_unit() < spec.loss_prob) return std::nullopt;
    const double jitter = spec.jitter_std * std::abs(rng.next_normal());
    return send_t + spec.base_latency + jitter;
}

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioRun run;

    // Ground truth on the fixed sampling grid, endpoints inclusive.
    for (std::int64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * kTruthSamplePeriod;
        if (t > cfg.duration + 1e-9) break;
        for (const ObjectSpec& obj : cfg.objects) {
            const TruthState s = truth_at(obj, std::min(t, cfg.duration), cfg.origin);
            run.truth.push_back(GroundTruthSample{t, obj.object_id,
                                                  enu_to_geo(s.pos, cfg.origin), s.vn,
                                                  s.ve});
        }
    }

    // One detection pass per camera frame per object, each wrapped as a
    // single-point tracklet. Per-camera random streams keep one camera's
    // draws independent of how many other cameras the scenario has.
    struct Scheduled {
        double delivery = 0.0;
        std::int64_t seq = 0;
        TrackletMessage msg;
        std::int64_t true_id = 0;
    };
    std::vector<Scheduled> scheduled;
    std::int64_t seq = 0;

    for (std::size_t ci = 0; ci < cfg.cameras.size(); ++ci) {
        const CameraSpec& cam = cfg.cameras[ci];
        RngStream cam_rng(mix_seed(cfg.seed, 0x1000 + ci));
        for (std::int64_t k = 0;; ++k) {
            const double t = static_cast<double>(k) * cam.frame_period;
            if (t >= cfg.duration) break;

            EnuPoint cam_pos = geo_to_enu(cam.position, cfg.origin);
            if (cam.mounted_on) {
                for (const ObjectSpec& obj : cfg.objects)
                    if (obj.object_id == *cam.mounted_on)
                        cam_pos = truth_at(obj, t, cfg.origin).pos;
            }

            for (const ObjectSpec& obj : cfg.objects) {
                if (cam.mounted_on && obj.object_id == *cam.mounted_on)
                    continue; // a camera never detects its own carrier
                const TruthState s = truth_at(obj, t, cfg.origin);
                auto pt = camera_observe(cam, cam_pos, s.pos, t, cam_rng, cfg.origin);
                if (!pt) continue;
                run.points_generated += 1;

                TrackletMessage msg;
                msg.sent_at = t;
                msg.tracklet.camera_id = cam.camera_id;
                msg.tracklet.local_object_id = obj.object_id;
                msg.tracklet.class_label = obj.class_label;
                msg.tracklet.points.push_back(*pt);

                if (auto delivery = channel_deliver(t, cfg.channel, cam_rng))
                    scheduled.push_back(Scheduled{*delivery, seq++, std::move(msg),
                                                  obj.object_id});
            }
        }
    }

    std::sort(scheduled.begin(), scheduled.end(), [](const Scheduled& a, const Scheduled& b) {
        if (a.delivery != b.delivery) return a.delivery < b.delivery;
        return a.seq < b.seq;
    });
    run.messages.reserve(scheduled.size());
    for (Scheduled& s : scheduled)
        run.messages.push_back(DeliveredMessage{s.delivery, std::move(s.msg), s.true_id});
    return run;
}

} // namespace trackfuse::sim
