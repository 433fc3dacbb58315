#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "trackfuse/random.hpp"
#include "trackfuse/tracklet.hpp"

using namespace trackfuse;

namespace {

TrackletMessage sample_message() {
    TrackletMessage m;
    m.sent_at = 2.5;
    m.tracklet.camera_id = "cam0";
    m.tracklet.local_object_id = 7;
    m.tracklet.class_label = ClassLabel::vehicle;
    m.tracklet.points = {TrackPoint{2.0, GeoPoint{41.5, 2.25}}};
    return m;
}

bool same_message(const TrackletMessage& a, const TrackletMessage& b) {
    if (a.schema_version != b.schema_version) return false;
    if (a.sent_at != b.sent_at) return false;
    if (a.tracklet.camera_id != b.tracklet.camera_id) return false;
    if (a.tracklet.local_object_id != b.tracklet.local_object_id) return false;
    if (a.tracklet.class_label != b.tracklet.class_label) return false;
    if (a.tracklet.points.size() != b.tracklet.points.size()) return false;
    for (std::size_t i = 0; i < a.tracklet.points.size(); ++i) {
        if (a.tracklet.points[i].t != b.tracklet.points[i].t) return false;
        if (a.tracklet.points[i].pos.lat != b.tracklet.points[i].pos.lat) return false;
        if (a.tracklet.points[i].pos.lon != b.tracklet.points[i].pos.lon) return false;
    }
    return true;
}

TrackletMessage random_message(RngStream& rng) {
    TrackletMessage m;
    m.tracklet.camera_id = "cam" + std::to_string(rng.next_u64() % 10);
    m.tracklet.local_object_id = static_cast<std::int64_t>(rng.next_u64() % 1000);
    m.tracklet.class_label = static_cast<ClassLabel>(rng.next_u64() % 4);
    const std::size_t n = 1 + rng.next_u64() % 4;
    double t = rng.next_unit() * 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        m.tracklet.points.push_back(
            TrackPoint{t, GeoPoint{41.0 + rng.next_normal(0.0, 0.01),
                                   2.0 + rng.next_normal(0.0, 0.01)}});
        t += 0.05 + rng.next_unit();
    }
    m.sent_at = m.tracklet.points.back().t + rng.next_unit();
    return m;
}

} // namespace

TEST_CASE("well-formed tracklet has no violations") {
    Tracklet t;
    t.camera_id = "cam0";
    t.points = {TrackPoint{0.0, GeoPoint{41.0, 2.0}}, TrackPoint{0.1, GeoPoint{41.0, 2.0001}},
                TrackPoint{0.2, GeoPoint{41.0001, 2.0001}}};
    CHECK(tracklet_violations(t).empty());
}

TEST_CASE("empty points is reported") {
    Tracklet t;
    t.camera_id = "cam0";
    const auto v = tracklet_violations(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "empty points");
}

TEST_CASE("equal timestamps violate strict monotonicity") {
    Tracklet t;
    t.points = {TrackPoint{1.0, GeoPoint{41.0, 2.0}}, TrackPoint{1.0, GeoPoint{41.0, 2.0}}};
    const auto v = tracklet_violations(t);
    CHECK(std::find(v.begin(), v.end(), "non-increasing timestamps") != v.end());
}

TEST_CASE("all violations are reported together") {
    Tracklet t;
    t.points = {TrackPoint{1.0, GeoPoint{95.0, 2.0}}, TrackPoint{0.5, GeoPoint{41.0, 2.0}}};
    const auto v = tracklet_violations(t);
    CHECK(v.size() == 2);
}

TEST_CASE("canonical encoding is the documented byte sequence") {
    const std::string line = encode_message(sample_message());
    CHECK(line ==
          "{\"v\":1,\"sent_at\":2.5,\"camera_id\":\"cam0\",\"object_id\":7,"
          "\"class\":\"vehicle\",\"points\":[{\"t\":2.0,\"lat\":41.5,\"lon\":2.25}]}\n");
}

TEST_CASE("floats render as shortest round-trip decimals") {
    TrackletMessage m = sample_message();
    m.tracklet.points[0].pos.lat = 1.5;
    const std::string line = encode_message(m);
    CHECK(line.find("\"lat\":1.5,") != std::string::npos);
    CHECK(same_message(decode_message(line), m));
}

TEST_CASE("encoding is deterministic") {
    const TrackletMessage m = sample_message();
    CHECK(encode_message(m) == encode_message(m));
}

TEST_CASE("decode inverts encode on randomized messages") {
    RngStream rng(321);
    for (int i = 0; i < 300; ++i) {
        const TrackletMessage m = random_message(rng);
        CHECK(same_message(decode_message(encode_message(m)), m));
    }
}

TEST_CASE("distinct messages encode to distinct bytes") {
    const TrackletMessage base = sample_message();
    auto mutate = [&](auto&& fn) {
        TrackletMessage m = sample_message();
        fn(m);
        CHECK(encode_message(m) != encode_message(base));
    };
    mutate([](TrackletMessage& m) { m.sent_at = 2.6; });
    mutate([](TrackletMessage& m) { m.tracklet.camera_id = "cam1"; });
    mutate([](TrackletMessage& m) { m.tracklet.local_object_id = 8; });
    mutate([](TrackletMessage& m) { m.tracklet.class_label = ClassLabel::pedestrian; });
    mutate([](TrackletMessage& m) { m.tracklet.points[0].t = 2.125; });
    mutate([](TrackletMessage& m) { m.tracklet.points[0].pos.lat = 41.75; });
}

TEST_CASE("decoder accepts any key order") {
    const std::string line =
        "{\"points\":[{\"lon\":2.25,\"t\":2.0,\"lat\":41.5}],\"class\":\"vehicle\","
        "\"object_id\":7,\"camera_id\":\"cam0\",\"sent_at\":2.5,\"v\":1}";
    CHECK(same_message(decode_message(line), sample_message()));
}

TEST_CASE("unknown schema version is rejected") {
    std::string line = encode_message(sample_message());
    const std::size_t pos = line.find("\"v\":1");
    line.replace(pos, 5, "\"v\":2");
    CHECK_THROWS_WITH_AS(decode_message(line),
                         doctest::Contains("unknown schema version"), DecodeError);
}

TEST_CASE("truncated or malformed lines are rejected whole") {
    const std::string line = encode_message(sample_message());
    CHECK_THROWS_AS(decode_message(line.substr(0, line.size() / 2)), DecodeError);
    CHECK_THROWS_AS(decode_message(""), DecodeError);
    CHECK_THROWS_AS(decode_message("not json"), DecodeError);
    CHECK_THROWS_AS(decode_message("[1,2,3]"), DecodeError);
}

TEST_CASE("decode enforces tracklet invariants") {
    // Two points with equal timestamps.
    const std::string line =
        "{\"v\":1,\"sent_at\":3.0,\"camera_id\":\"c\",\"object_id\":1,\"class\":\"unknown\","
        "\"points\":[{\"t\":1.0,\"lat\":0.0,\"lon\":0.0},{\"t\":1.0,\"lat\":0.0,\"lon\":0.0}]}";
    CHECK_THROWS_AS(decode_message(line), DecodeError);

    // sent_at before the last point.
    const std::string early =
        "{\"v\":1,\"sent_at\":0.5,\"camera_id\":\"c\",\"object_id\":1,\"class\":\"unknown\","
        "\"points\":[{\"t\":1.0,\"lat\":0.0,\"lon\":0.0}]}";
    CHECK_THROWS_AS(decode_message(early), DecodeError);

    // Unknown class string.
    const std::string badclass =
        "{\"v\":1,\"sent_at\":2.0,\"camera_id\":\"c\",\"object_id\":1,\"class\":\"bike\","
        "\"points\":[{\"t\":1.0,\"lat\":0.0,\"lon\":0.0}]}";
    CHECK_THROWS_AS(decode_message(badclass), DecodeError);
}

TEST_CASE("class labels round-trip through names") {
    for (ClassLabel c : {ClassLabel::vehicle, ClassLabel::pedestrian, ClassLabel::camera,
                         ClassLabel::unknown})
        CHECK(class_from_string(to_string(c)) == c);
    CHECK(!class_from_string("tricycle").has_value());
}
