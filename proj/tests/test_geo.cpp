#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "trackfuse/geo.hpp"
#include "trackfuse/random.hpp"

using namespace trackfuse;

TEST_CASE("geo_to_enu at the origin is zero") {
    const ReferenceOrigin ref{GeoPoint{41.27, 1.98}};
    const EnuPoint e = geo_to_enu(ref.origin, ref);
    CHECK(e.east == 0.0);
    CHECK(e.north == 0.0);
}

TEST_CASE("one degree of latitude is 111194.9267 m") {
    const ReferenceOrigin ref{GeoPoint{0.0, 0.0}};
    const EnuPoint e = geo_to_enu(GeoPoint{1.0, 0.0}, ref);
    CHECK(std::abs(e.north - 111194.9267) < 1e-3);
    CHECK(e.east == 0.0);
}

TEST_CASE("one degree of longitude at 60N is halved") {
    const ReferenceOrigin ref{GeoPoint{60.0, 0.0}};
    const EnuPoint e = geo_to_enu(GeoPoint{60.0, 1.0}, ref);
    CHECK(std::abs(e.east - 55597.4633) < 1e-3);
    CHECK(e.north == 0.0);
}

TEST_CASE("enu_to_geo at (0,0) returns the reference") {
    const ReferenceOrigin ref{GeoPoint{41.27, 1.98}};
    const GeoPoint g = enu_to_geo(EnuPoint{0.0, 0.0}, ref);
    CHECK(g.lat == ref.origin.lat);
    CHECK(g.lon == ref.origin.lon);
}

TEST_CASE("enu_to_geo inverts the one-degree example") {
    const ReferenceOrigin ref{GeoPoint{0.0, 0.0}};
    const GeoPoint g = enu_to_geo(EnuPoint{0.0, 111194.9267}, ref);
    CHECK(std::abs(g.lat - 1.0) < 1e-6);
    CHECK(std::abs(g.lon - 0.0) < 1e-6);
}

TEST_CASE("enu_to_geo rejects near-polar references") {
    CHECK_THROWS_AS(enu_to_geo(EnuPoint{1.0, 1.0}, ReferenceOrigin{GeoPoint{89.0, 0.0}}),
                    ConfigError);
    CHECK_THROWS_AS(enu_to_geo(EnuPoint{1.0, 1.0}, ReferenceOrigin{GeoPoint{-89.5, 0.0}}),
                    ConfigError);
    CHECK_NOTHROW(enu_to_geo(EnuPoint{1.0, 1.0}, ReferenceOrigin{GeoPoint{88.9, 0.0}}));
}

TEST_CASE("round trip within 10 km is identity to 1e-9 degrees") {
    RngStream rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const ReferenceOrigin ref{
            GeoPoint{rng.next_unit() * 170.0 - 85.0, rng.next_unit() * 360.0 - 180.0}};
        const EnuPoint offset{(rng.next_unit() * 2.0 - 1.0) * 10000.0,
                              (rng.next_unit() * 2.0 - 1.0) * 10000.0};
        const GeoPoint p = enu_to_geo(offset, ref);
        const EnuPoint back = geo_to_enu(p, ref);
        const GeoPoint p2 = enu_to_geo(back, ref);
        CHECK(std::abs(p2.lat - p.lat) < 1e-9);
        CHECK(std::abs(p2.lon - p.lon) < 1e-9);
    }
}

TEST_CASE("enu_distance examples") {
    CHECK(enu_distance(EnuPoint{1.0, 2.0}, EnuPoint{1.0, 2.0}) == 0.0);
    CHECK(enu_distance(EnuPoint{0.0, 0.0}, EnuPoint{3.0, 4.0}) == 5.0);
    CHECK(enu_distance(EnuPoint{1.0, 1.0}, EnuPoint{-2.0, 5.0}) == 5.0);
}

TEST_CASE("enu_distance is a metric") {
    RngStream rng(7);
    auto random_point = [&] {
        return EnuPoint{rng.next_normal(0.0, 500.0), rng.next_normal(0.0, 500.0)};
    };
    for (int i = 0; i < 1000; ++i) {
        const EnuPoint a = random_point();
        const EnuPoint b = random_point();
        const EnuPoint c = random_point();
        CHECK(enu_distance(a, b) >= 0.0);
        CHECK(enu_distance(a, b) == enu_distance(b, a));
        CHECK(enu_distance(a, c) <= enu_distance(a, b) + enu_distance(b, c) + 1e-12);
    }
}

TEST_CASE("geo_to_enu is affine: midpoints map to midpoints") {
    RngStream rng(99);
    const ReferenceOrigin ref{GeoPoint{41.27, 1.98}};
    for (int i = 0; i < 500; ++i) {
        const GeoPoint p{41.27 + rng.next_normal(0.0, 0.01), 1.98 + rng.next_normal(0.0, 0.01)};
        const GeoPoint q{41.27 + rng.next_normal(0.0, 0.01), 1.98 + rng.next_normal(0.0, 0.01)};
        const GeoPoint mid{(p.lat + q.lat) / 2.0, (p.lon + q.lon) / 2.0};
        const EnuPoint ep = geo_to_enu(p, ref);
        const EnuPoint eq = geo_to_enu(q, ref);
        const EnuPoint em = geo_to_enu(mid, ref);
        CHECK(std::abs(em.east - (ep.east + eq.east) / 2.0) < 1e-9);
        CHECK(std::abs(em.north - (ep.north + eq.north) / 2.0) < 1e-9);
    }
}
