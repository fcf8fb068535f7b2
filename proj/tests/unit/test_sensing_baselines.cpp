#include "doctest.h"

#include "safeyaw/baselines.hpp"
#include "safeyaw/sensing.hpp"

using namespace safeyaw;

namespace {

// Samples the obstacle's horizontal boundary circle: detected iff every sample
// lies inside the wedge. Also reports how close the decision was.
bool boundary_inside(const Vec3& uav, double psi, const SensorModel& s, const Vec3& c, double radius, double& margin) {
    margin = 1e300;
    bool inside = true;
    for (int k = 0; k < 20000; ++k) {
        const double a = kTwoPi * k / 20000.0;
        const Vec3 p{c.x + radius * std::cos(a), c.y + radius * std::sin(a), c.z};
        const double range = horizontal_distance(uav, p);
        const double off = std::abs(wrap_angle(horizontal_bearing(uav, p) - psi));
        margin = std::min({margin, std::abs(s.rho - range), std::abs(s.sigma - off) * range});
        inside = inside && range <= s.rho && off <= s.sigma;
    }
    return inside;
}

ObstacleState obstacle_at(const Vec3& c, const Vec3& v = {}) { return {c, v, {}, 0.1, 0.24}; }

}  // namespace

TEST_CASE("detection agrees with boundary sampling") {
    Rng rng(15);
    const SensorModel sensor;
    int agreed = 0, positives = 0;
    for (int i = 0; i < 600; ++i) {
        const UavState uav{{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.5}, {}, Quat::identity(), {}};
        const double psi = rng.uniform(-kPi, kPi);
        const Vec3 c{uav.r.x + rng.uniform(-3.5, 3.5), uav.r.y + rng.uniform(-3.5, 3.5), 0.5};
        if (horizontal_distance(uav.r, c) <= 0.1) continue;
        double margin = 0.0;
        const bool ref = boundary_inside(uav.r, psi, sensor, c, 0.1, margin);
        if (margin < 1e-3) continue;  // too close to call with a sampled boundary
        const bool got = detect(uav, psi, sensor, obstacle_at(c));
        CHECK(got == ref);
        agreed += got == ref;
        positives += ref;
    }
    CHECK(agreed > 300);
    CHECK(positives > 20);
}

TEST_CASE("detection edge cases") {
    const SensorModel sensor;
    const UavState uav{{0, 0, 0.5}, {}, Quat::identity(), {}};
    CHECK(detect(uav, 0.0, sensor, obstacle_at({1.0, 0, 0.5})));
    CHECK_FALSE(detect(uav, kPi, sensor, obstacle_at({1.0, 0, 0.5})));
    CHECK_FALSE(detect(uav, 0.0, sensor, obstacle_at({2.95, 0, 0.5})));  // disc pokes out of range
    CHECK(detect(uav, 0.0, sensor, obstacle_at({2.85, 0, 0.5})));
    CHECK(detect(uav, kPi, sensor, obstacle_at({0.05, 0, 0.5})));  // interpenetrating
}

TEST_CASE("track bookkeeping") {
    const UavState uav{{0, 0, 0.5}, {}, Quat::identity(), {}};
    const TrackContext ctx{uav, {}, {}, CoastMode::ConstantVelocity};
    std::vector<ObstacleState> truth{obstacle_at({1, 0, 0.5}, {0.2, -0.1, 0}), obstacle_at({-2, 0, 0.5})};
    auto tracks = make_tracks(truth);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[1].id == 1);
    CHECK_FALSE(tracks[0].ever_seen);

    const double dt = 0.002;
    update_tracks(tracks, {true, false}, truth, dt, ctx);
    CHECK(tracks[0].ever_seen);
    CHECK(tracks[0].tau == 0.0);
    CHECK(norm(tracks[0].position - truth[0].r_c) == 0.0);
    CHECK_FALSE(tracks[1].ever_seen);
    CHECK(tracks[1].tau == 0.0);

    SUBCASE("detected every step keeps tau at zero") {
        for (int k = 0; k < 100; ++k) update_tracks(tracks, {true, false}, truth, dt, ctx);
        CHECK(tracks[0].tau == 0.0);
    }
    SUBCASE("occluded for one second accumulates exactly and coasts") {
        for (int k = 0; k < 500; ++k) update_tracks(tracks, {false, false}, truth, dt, ctx);
        CHECK(tracks[0].tau == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(tracks[0].position - (truth[0].r_c + 1.0 * truth[0].v_c)) < 1e-12);
        CHECK(norm(tracks[0].last_seen_position - truth[0].r_c) == 0.0);
        // Re-detection resets.
        update_tracks(tracks, {true, false}, truth, dt, ctx);
        CHECK(tracks[0].tau == 0.0);
    }
    SUBCASE("coasting after half a second") {
        for (int k = 0; k < 250; ++k) update_tracks(tracks, {false, false}, truth, dt, ctx);
        CHECK(norm(tracks[0].position - (truth[0].r_c + 0.5 * truth[0].v_c)) < 1e-12);
    }
    SUBCASE("hold mode freezes the estimate") {
        TrackContext hold = ctx;
        hold.coast = CoastMode::HoldPosition;
        for (int k = 0; k < 250; ++k) update_tracks(tracks, {false, false}, truth, dt, hold);
        CHECK(norm(tracks[0].position - truth[0].r_c) == 0.0);
    }
    SUBCASE("h follows the CBF value of the estimate") {
        const CbfRow row = cbf_row(uav, {}, track_obstacle(tracks[0]), {}, {});
        CHECK(tracks[0].h == doctest::Approx(row.h_value));
    }
    CHECK_THROWS_AS(update_tracks(tracks, {true}, truth, dt, ctx), std::invalid_argument);
    CHECK_THROWS_AS(update_tracks(tracks, {true, true}, truth, 0.0, ctx), std::invalid_argument);
}

TEST_CASE("heuristic policies") {
    const UavState uav{{0, 0, 0.5}, {}, Quat::identity(), {}};
    SUBCASE("fixed") { CHECK(fixed_yaw({PolicyKind::Fixed, 4.0}) == doctest::Approx(4.0 - kTwoPi)); }
    SUBCASE("look-ahead points at the reference and holds when on it") {
        const PositionReference ref{{0, 1, 0.5}, {}, {}};
        CHECK(look_ahead(uav, ref, 0.0) == doctest::Approx(kPi / 2));
        const PositionReference here{{0.0005, 0, 0.5}, {}, {}};
        CHECK(look_ahead(uav, here, 1.25) == 1.25);
    }
    SUBCASE("nearest obstacle, ties by id, fallback without tracks") {
        std::vector<ObstacleTrack> tracks(3);
        for (int i = 0; i < 3; ++i) tracks[i].id = i;
        const PositionReference ref{{1, 0, 0.5}, {}, {}};
        CHECK(nearest_obstacle(uav, tracks, ref, 0.3) == doctest::Approx(0.0));
        tracks[2].ever_seen = true;
        tracks[2].position = {0, -1, 0.5};
        tracks[1].ever_seen = true;
        tracks[1].position = {-1, 0, 0.5};
        CHECK(nearest_obstacle(uav, tracks, ref, 0.0) == doctest::Approx(-kPi));
        tracks[0].ever_seen = true;
        tracks[0].position = {0, 3, 0.5};
        CHECK(nearest_obstacle(uav, tracks, ref, 0.0) == doctest::Approx(-kPi));
    }
    SUBCASE("policy names") {
        for (auto k : {PolicyKind::Fixed, PolicyKind::LookAhead, PolicyKind::NearestObstacle, PolicyKind::SafetyAware})
            CHECK(policy_kind_from_string(to_string(k)) == k);
        CHECK(policy_kind_from_string("nearest_obstacle") == PolicyKind::NearestObstacle);
        CHECK_THROWS(policy_kind_from_string("random"));
    }
}
