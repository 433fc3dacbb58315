#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "trackfuse/fusion.hpp"
#include "trackfuse/random.hpp"

using namespace trackfuse;

namespace {

const ReferenceOrigin kOrigin{GeoPoint{41.27, 1.98}};

TrackletMessage point_message(const std::string& camera, std::int64_t object_id, double t,
                              const EnuPoint& pos = EnuPoint{}, double sent_at = -1.0) {
    TrackletMessage m;
    m.sent_at = sent_at < 0.0 ? t : sent_at;
    m.tracklet.camera_id = camera;
    m.tracklet.local_object_id = object_id;
    m.tracklet.class_label = ClassLabel::vehicle;
    m.tracklet.points = {TrackPoint{t, enu_to_geo(pos, kOrigin)}};
    return m;
}

FusionEngine make_engine(FusionConfig fusion = {}, FilterConfig filter = {},
                         AssociationConfig assoc = {}) {
    return FusionEngine(kOrigin, fusion, filter, assoc, 99);
}

FilterConfig exact_filter() {
    FilterConfig cfg;
    cfg.n_particles = 4;
    cfg.process_noise_pos = 0.0;
    cfg.process_noise_vel = 0.0;
    cfg.init_pos_std = 0.0;
    cfg.init_vel_std = 0.0;
    return cfg;
}

} // namespace

TEST_CASE("first message sets the clock and is accepted") {
    FusionEngine eng = make_engine();
    const IngestResult r = eng.ingest(point_message("cam0", 0, 3.25));
    CHECK(r.accepted == 1);
    CHECK(r.late_dropped == 0);
    CHECK(eng.clock() == 3.25);
}

TEST_CASE("points older than the watermark are dropped and counted") {
    FusionEngine eng = make_engine();
    eng.ingest(point_message("cam0", 0, 10.0));
    const IngestResult r =
        eng.ingest(point_message("cam0", 0, 10.0 - 0.5 - 1.0, EnuPoint{}, 10.0));
    CHECK(r.accepted == 0);
    CHECK(r.late_dropped == 1);
    CHECK(eng.stats().points_late_dropped == 1);
    CHECK(eng.stats().points_accepted == 1);
}

TEST_CASE("out-of-order arrivals within the watermark are both accepted") {
    FusionEngine eng = make_engine();
    CHECK(eng.ingest(point_message("cam0", 0, 1.30)).accepted == 1);
    CHECK(eng.ingest(point_message("cam1", 0, 1.05, EnuPoint{}, 1.30)).accepted == 1);
}

TEST_CASE("a point exactly at the watermark boundary is accepted and released") {
    FusionEngine eng = make_engine();
    eng.ingest(point_message("cam0", 0, 2.0));
    const IngestResult r = eng.ingest(point_message("cam1", 0, 1.5, EnuPoint{}, 2.0));
    CHECK(r.accepted == 1);
    const auto applied = eng.advance();
    REQUIRE(applied.size() == 1);
    CHECK(applied[0].t == 1.5);
}

TEST_CASE("multi-point tracklets split into per-point observations") {
    FusionEngine eng = make_engine(FusionConfig{}, exact_filter());
    TrackletMessage m;
    m.sent_at = 2.0;
    m.tracklet.camera_id = "cam0";
    m.tracklet.local_object_id = 3;
    m.tracklet.class_label = ClassLabel::vehicle;
    m.tracklet.points = {TrackPoint{1.6, enu_to_geo(EnuPoint{0.0, 0.0}, kOrigin)},
                         TrackPoint{1.8, enu_to_geo(EnuPoint{0.4, 0.0}, kOrigin)},
                         TrackPoint{2.0, enu_to_geo(EnuPoint{0.8, 0.0}, kOrigin)}};
    const IngestResult r = eng.ingest(m);
    CHECK(r.accepted == 3);
    const auto applied = eng.flush();
    REQUIRE(applied.size() == 3);
    CHECK(applied[0].t == 1.6);
    CHECK(applied[2].t == 2.0);
    CHECK(eng.store().tracks_created() == 1); // all three fuse into one track
}

TEST_CASE("a tracklet spanning past the watermark loses only its stale points") {
    FusionEngine eng = make_engine();
    eng.ingest(point_message("cam0", 0, 5.0));
    TrackletMessage m;
    m.sent_at = 5.0;
    m.tracklet.camera_id = "cam1";
    m.tracklet.local_object_id = 0;
    m.tracklet.class_label = ClassLabel::vehicle;
    // watermark bound is 4.5: the first point is stale, the other two hold
    m.tracklet.points = {TrackPoint{4.2, kOrigin.origin}, TrackPoint{4.6, kOrigin.origin},
                         TrackPoint{5.0, kOrigin.origin}};
    const IngestResult r = eng.ingest(m);
    CHECK(r.accepted == 2);
    CHECK(r.late_dropped == 1);
}

TEST_CASE("advance on an empty buffer does nothing") {
    FusionEngine eng = make_engine();
    CHECK(eng.advance().empty());
    eng.ingest(point_message("cam0", 0, 1.0));
    CHECK(eng.advance().empty()); // 1.0 > clock - watermark, still buffered
    CHECK(eng.buffered() == 1);
}

TEST_CASE("accepted plus late equals total ingested points") {
    FusionEngine eng = make_engine();
    RngStream rng(5);
    std::int64_t total = 0;
    double clock = 0.0;
    for (int i = 0; i < 200; ++i) {
        clock += rng.next_unit() * 0.2;
        const double t = clock - rng.next_unit() * 0.8; // some points are stale
        eng.ingest(point_message("cam0", 0, std::max(t, 0.0), EnuPoint{}, clock));
        eng.advance();
        total += 1;
    }
    CHECK(eng.stats().points_accepted + eng.stats().points_late_dropped == total);
}

TEST_CASE("flush drains everything left in the buffer") {
    FusionEngine eng = make_engine(FusionConfig{}, exact_filter());
    eng.ingest(point_message("cam0", 0, 1.0, EnuPoint{1.0, 0.0}));
    eng.ingest(point_message("cam0", 0, 1.1, EnuPoint{1.1, 0.0}));
    CHECK(eng.advance().empty());
    const auto applied = eng.flush();
    CHECK(applied.size() == 2);
    CHECK(eng.buffered() == 0);
}

TEST_CASE("interleaved two-camera delivery matches in-order delivery") {
    auto run = [&](const std::vector<TrackletMessage>& order) {
        FusionEngine eng = make_engine();
        for (const auto& m : order) {
            eng.ingest(m);
            eng.advance();
        }
        eng.flush();
        REQUIRE(eng.store().tracks().size() == 1);
        return eng.store().tracks()[0].filter.estimate();
    };

    // One object seen by two cameras at interleaved instants.
    std::vector<TrackletMessage> in_order;
    RngStream noise(21);
    for (int i = 0; i < 30; ++i) {
        const double t = 0.1 * i;
        const EnuPoint truth{2.0 * t, 1.0 * t};
        const std::string cam = (i % 2 == 0) ? "cam0" : "cam1";
        in_order.push_back(point_message(cam, 0, t,
                                         EnuPoint{truth.east + noise.next_normal(0.0, 0.5),
                                                  truth.north + noise.next_normal(0.0, 0.5)}));
    }

    // Swap neighbours that are closer together than the watermark.
    std::vector<TrackletMessage> shuffled = in_order;
    for (std::size_t i = 0; i + 1 < shuffled.size(); i += 2)
        std::swap(shuffled[i], shuffled[i + 1]);

    const KinematicState a = run(in_order);
    const KinematicState b = run(shuffled);
    CHECK(std::abs(a.x_lat - b.x_lat) < 1e-9);
    CHECK(std::abs(a.x_lon - b.x_lon) < 1e-9);
    CHECK(std::abs(a.dx_lat - b.dx_lat) < 1e-9);
    CHECK(std::abs(a.dx_lon - b.dx_lon) < 1e-9);
}

TEST_CASE("association is blind to camera and object ids") {
    auto run = [&](const std::string& cam_a, const std::string& cam_b, std::int64_t oid) {
        FusionEngine eng = make_engine();
        for (int i = 0; i < 25; ++i) {
            const double t = 0.1 * i;
            const std::string cam = (i % 2 == 0) ? cam_a : cam_b;
            eng.ingest(point_message(cam, oid, t, EnuPoint{3.0 * t, -t}));
            eng.advance();
        }
        eng.flush();
        std::vector<std::pair<double, double>> geometry;
        for (const Track& trk : eng.store().tracks()) {
            const KinematicState est = trk.filter.estimate();
            geometry.emplace_back(est.x_lon, est.x_lat);
        }
        return geometry;
    };
    const auto base = run("cam0", "cam1", 4);
    const auto renamed = run("zulu", "alpha", 99);
    REQUIRE(base.size() == renamed.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].first == renamed[i].first);
        CHECK(base[i].second == renamed[i].second);
    }
}

TEST_CASE("clean single-object input never fragments with a wide gate") {
    AssociationConfig assoc;
    assoc.gate_radius = 1e9;
    FusionEngine eng(kOrigin, FusionConfig{}, FilterConfig{}, assoc, 7);
    for (int i = 0; i < 60; ++i) {
        const double t = 0.1 * i;
        eng.ingest(point_message("cam0", 0, t, EnuPoint{5.0 * t, 0.0}));
        eng.advance();
    }
    eng.flush();
    CHECK(eng.store().tracks_created() == 1);
}

TEST_CASE("trajectory propagation: stationary and moving estimates") {
    FusionConfig cfg; // horizon 3.0, step 0.25

    const TrajectoryPrediction still =
        propagate_estimate(1, KinematicState{4.0, 0.0, -2.0, 0.0}, 0.0, 10.0, cfg);
    CHECK(still.points.size() == 13);
    for (const auto& [t, pos] : still.points) {
        CHECK(pos.east == -2.0);
        CHECK(pos.north == 4.0);
    }
    CHECK(still.points.front().first == 10.0);
    CHECK(still.points.back().first == 13.0);

    // estimate at (0,0) moving 1 m/s east: two seconds ahead -> (2, 0)
    const TrajectoryPrediction moving =
        propagate_estimate(2, KinematicState{0.0, 0.0, 0.0, 1.0}, 0.0, 0.0, cfg);
    const auto& p2 = moving.points[8]; // 8 * 0.25 s = 2 s
    CHECK(p2.first == 2.0);
    CHECK(p2.second.east == 2.0);
    CHECK(p2.second.north == 0.0);

    // timestamps strictly increase on a uniform grid
    for (std::size_t i = 1; i < moving.points.size(); ++i)
        CHECK(moving.points[i].first - moving.points[i - 1].first ==
              doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("tentative tracks do not produce trajectories") {
    AssociationConfig assoc;
    assoc.confirm_after = 3;
    FusionEngine eng(kOrigin, FusionConfig{}, exact_filter(), assoc, 3);
    eng.ingest(point_message("cam0", 0, 0.0, EnuPoint{0.0, 0.0}));
    eng.ingest(point_message("cam0", 0, 0.7, EnuPoint{0.0, 0.0}));
    eng.advance(); // applies t=0 only (watermark), track tentative
    CHECK(eng.predict_trajectories().empty());
    eng.ingest(point_message("cam0", 0, 1.4, EnuPoint{0.0, 0.0}));
    eng.ingest(point_message("cam0", 0, 2.1, EnuPoint{0.0, 0.0}));
    eng.advance();
    eng.flush();
    CHECK(eng.store().tracks()[0].status == TrackStatus::confirmed);
    CHECK(eng.predict_trajectories().size() == 1);
}

TEST_CASE("collision detection on constructed trajectories") {
    FusionConfig cfg; // collision_distance 2.5

    SUBCASE("parallel tracks far apart never alert") {
        const auto a = propagate_estimate(0, KinematicState{0.0, 0.0, 0.0, 5.0}, 0.0, 0.0, cfg);
        const auto b =
            propagate_estimate(1, KinematicState{100.0, 0.0, 0.0, 5.0}, 0.0, 0.0, cfg);
        CHECK(detect_collisions({a, b}, cfg).empty());
    }

    SUBCASE("perpendicular crossing through the origin alerts with distance zero") {
        // Both reach the origin at t = 2 s, a grid instant.
        const auto a =
            propagate_estimate(0, KinematicState{0.0, 0.0, -10.0, 5.0}, 0.0, 0.0, cfg);
        const auto b =
            propagate_estimate(1, KinematicState{-10.0, 5.0, 0.0, 0.0}, 0.0, 0.0, cfg);
        const auto alerts = detect_collisions({a, b}, cfg);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].track_a == 0);
        CHECK(alerts[0].track_b == 1);
        CHECK(alerts[0].t_closest == 2.0);
        CHECK(alerts[0].min_distance == 0.0);
    }

    SUBCASE("grid minimum tracks the analytic closest approach") {
        // Two straight paths: closest approach is off-grid; the sampled
        // minimum must sit within one grid step of the analytic optimum and
        // within max-speed * step of the true distance.
        const KinematicState sa{0.0, 0.0, -12.0, 6.0};
        const KinematicState sb{-9.0, 4.0, 0.0, 0.3};
        const auto a = propagate_estimate(0, sa, 0.0, 0.0, cfg);
        const auto b = propagate_estimate(1, sb, 0.0, 0.0, cfg);

        // Analytic CPA of two linear motions.
        const double rx = sb.x_lon - sa.x_lon;
        const double ry = sb.x_lat - sa.x_lat;
        const double vx = sb.dx_lon - sa.dx_lon;
        const double vy = sb.dx_lat - sa.dx_lat;
        const double t_star = std::clamp(-(rx * vx + ry * vy) / (vx * vx + vy * vy), 0.0,
                                         cfg.prediction_horizon);
        const double dx = rx + vx * t_star;
        const double dy = ry + vy * t_star;
        const double d_star = std::hypot(dx, dy);

        double grid_min = 1e9;
        double grid_t = 0.0;
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            const double d = enu_distance(a.points[i].second, b.points[i].second);
            if (d < grid_min) {
                grid_min = d;
                grid_t = a.points[i].first;
            }
        }
        const double max_speed = std::max(std::hypot(sa.dx_lon, sa.dx_lat),
                                          std::hypot(sb.dx_lon, sb.dx_lat));
        CHECK(std::abs(grid_t - t_star) <= cfg.prediction_step);
        CHECK(grid_min >= d_star - 1e-9);
        CHECK(grid_min <= d_star + max_speed * cfg.prediction_step);

        const auto alerts = detect_collisions({a, b}, cfg);
        if (grid_min <= cfg.collision_distance) {
            REQUIRE(alerts.size() == 1);
            CHECK(alerts[0].min_distance == grid_min);
            CHECK(alerts[0].t_closest == grid_t);
        } else {
            CHECK(alerts.empty());
        }
    }

    SUBCASE("one alert per unordered pair") {
        const auto a = propagate_estimate(5, KinematicState{0.0, 0.0, 0.0, 0.0}, 0.0, 0.0, cfg);
        const auto b = propagate_estimate(9, KinematicState{1.0, 0.0, 0.0, 0.0}, 0.0, 0.0, cfg);
        const auto c = propagate_estimate(2, KinematicState{2.0, 0.0, 0.0, 0.0}, 0.0, 0.0, cfg);
        const auto alerts = detect_collisions({a, b, c}, cfg);
        CHECK(alerts.size() == 3); // every pair within 2.5 m, each reported once
        std::map<std::pair<std::int64_t, std::int64_t>, int> pairs;
        for (const auto& al : alerts) {
            CHECK(al.track_a < al.track_b);
            pairs[{al.track_a, al.track_b}] += 1;
        }
        for (const auto& [key, count] : pairs) CHECK(count == 1);
    }
}

TEST_CASE("alert decisions agree with the analytic CPA outside the grid-error band") {
    FusionConfig cfg;
    RngStream rng(2718);
    int decisive = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const KinematicState sa{rng.next_normal(0.0, 15.0), rng.next_normal(0.0, 6.0),
                                rng.next_normal(0.0, 15.0), rng.next_normal(0.0, 6.0)};
        const KinematicState sb{rng.next_normal(0.0, 15.0), rng.next_normal(0.0, 6.0),
                                rng.next_normal(0.0, 15.0), rng.next_normal(0.0, 6.0)};
        const auto pa = propagate_estimate(0, sa, 0.0, 0.0, cfg);
        const auto pb = propagate_estimate(1, sb, 0.0, 0.0, cfg);

        // Analytic minimum separation of the two linear motions over the
        // horizon (distance^2 is a parabola in t; clamp to the window).
        const double rx = sb.x_lon - sa.x_lon;
        const double ry = sb.x_lat - sa.x_lat;
        const double vx = sb.dx_lon - sa.dx_lon;
        const double vy = sb.dx_lat - sa.dx_lat;
        const double v2 = vx * vx + vy * vy;
        const double t_star =
            v2 == 0.0 ? 0.0
                      : std::clamp(-(rx * vx + ry * vy) / v2, 0.0, cfg.prediction_horizon);
        const double d_star = std::hypot(rx + vx * t_star, ry + vy * t_star);

        const double max_speed = std::max(std::hypot(sa.dx_lon, sa.dx_lat),
                                          std::hypot(sb.dx_lon, sb.dx_lat));
        const double grid_error = max_speed * cfg.prediction_step;
        if (std::abs(d_star - cfg.collision_distance) <= grid_error) continue;

        ++decisive;
        const bool alerted = !detect_collisions({pa, pb}, cfg).empty();
        CHECK(alerted == (d_star < cfg.collision_distance));
    }
    CHECK(decisive > 300); // the band must not swallow the property
}

TEST_CASE("fusion config validation") {
    FusionConfig bad;
    bad.prediction_step = 4.0; // exceeds default horizon of 3
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = FusionConfig{};
    bad.watermark_delay = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
