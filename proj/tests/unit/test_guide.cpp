#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "hfp/errors.hpp"
#include "hfp/guide.hpp"

using namespace hfp;
namespace fs = std::filesystem;

namespace {

GeoPoint pt(double lat, double lon) { return GeoPoint::make(lat, lon, 10'668); }

const WeatherField kCalm = make_uniform(0, 0, 288.15, kGlobalBox);

}  // namespace

TEST_CASE("features of a northbound trip") {
    const GeoPoint a = pt(40, 5), b = pt(50, 5);
    const double trip = great_circle_distance(a, b);
    const WeatherField f = make_uniform(25, -10, 258.15, kGlobalBox);
    const FeatureVector x = extract_features(a, b, trip_rotation(a, b), f, trip);
    CHECK(std::abs(x[0]) < 1e-9);
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(x[2] == doctest::Approx(0.5));
    CHECK(x[3] == doctest::Approx(-0.2));
    CHECK(x[4] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(extract_features(a, b, {}, f, 0.0), DegenerateTrip);
}

TEST_CASE("displacement features are invariant to trip heading") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> brg(0, 2 * std::numbers::pi), d(2e5, 2e6);
    for (int k = 0; k < 50; ++k) {
        const GeoPoint a = pt(45, 10);
        const double dist = d(rng);
        const GeoPoint b = destination_point(a, brg(rng), dist);
        const FeatureVector x = extract_features(a, b, trip_rotation(a, b), kCalm, dist);
        CHECK(std::abs(x[0]) < 1e-9);
        CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("gaussian log density") {
    const Eigen::Vector2d mean(0.3, -0.2), ls(std::log(0.5), 0.0);
    const Action raw{0.8, 0.1};
    const double expect = -0.5 * std::pow((0.8 - 0.3) / 0.5, 2) - std::log(0.5) - 0.5 * std::log(2 * std::numbers::pi) -
                          0.5 * std::pow(0.3, 2) - 0.5 * std::log(2 * std::numbers::pi);
    CHECK(gaussian_log_prob(raw, mean, ls) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("policy action") {
    const PolicyParams z = PolicyParams::zeros();
    const ActionSample det = policy_action(z, FeatureVector{0.1, 0.9, 0.2, 0.0, -0.1});
    CHECK(det.raw == Action{0, 0});
    CHECK(det.action == Action{0, 0});

    const PolicyParams p = PolicyParams::initialized(11);
    std::mt19937_64 r1(5), r2(5);
    const FeatureVector f{0.0, 1.0, 0.4, 0.1, 0.0};
    const ActionSample s1 = policy_action(p, f, &r1), s2 = policy_action(p, f, &r2);
    CHECK(s1.raw == s2.raw);
    for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(s1.action[k]) <= 1.0);
        CHECK(s1.action[k] == doctest::Approx(std::tanh(s1.raw[k])));
    }
    const Eigen::MatrixXd mean = p.action_means(Eigen::Map<const Eigen::VectorXd>(f.data(), 5));
    CHECK(s1.log_prob == doctest::Approx(gaussian_log_prob(s1.raw, mean.col(0), p.log_std())));
    CHECK(p.theta().size() == p.critic_offset_end() + 2);
    CHECK(p.log_std().isZero());
}

TEST_CASE("guide step caps the move at one step") {
    const GeoPoint o = pt(45, 0), d = pt(45, 20);
    const RotationAngle phi = trip_rotation(o, d);
    const double scale = step_scale(o, d, 5);
    CHECK(scale == doctest::Approx(great_circle_distance(o, d) / 5));

    const GeoPoint corner = guide_step(o, o, d, {1, 1}, phi, 5);
    CHECK(great_circle_distance(o, corner) == doctest::Approx(scale).epsilon(1e-9));
    const GeoPoint half = guide_step(o, o, d, {0, 0.5}, phi, 5);
    CHECK(great_circle_distance(o, half) == doctest::Approx(0.5 * scale).epsilon(1e-9));
    // Action (0, 1) is straight at the destination.
    const GeoPoint fwd = guide_step(o, o, d, {0, 1}, phi, 5, 300);
    CHECK(great_circle_distance(fwd, d) == doctest::Approx(great_circle_distance(o, d) - scale).epsilon(1e-6));
    CHECK(fwd.alt_m == doctest::Approx(o.alt_m + 300));
    CHECK(guide_step(o, o, d, {0, 0}, phi, 5).same_position(o));
    CHECK_THROWS_AS(step_scale(o, d, 1), InvalidArgument);
}

TEST_CASE("great-circle roll out") {
    const GeoPoint o = pt(50, 8), d = pt(41, 12);
    GuideConfig cfg;
    cfg.waypoints = 6;
    const CoarseRoute c = roll_out(cfg, nullptr, o, d, kCalm);
    REQUIRE(c.waypoints.size() == 6);
    CHECK(c.waypoints.front() == o);
    CHECK(c.waypoints.back() == d);
    const double total = great_circle_distance(o, d);
    for (int k = 0; k < 6; ++k)
        CHECK(great_circle_distance(o, c.waypoints[k]) == doctest::Approx(total * k / 5).epsilon(1e-9));
    CHECK_THROWS_AS(roll_out(cfg, nullptr, o, o, kCalm), DegenerateTrip);
    cfg.waypoints = 1;
    CHECK_THROWS_AS(roll_out(cfg, nullptr, o, d, kCalm), InvalidArgument);
}

TEST_CASE("policy roll out") {
    const GeoPoint o = pt(50, 8), d = pt(41, 12);
    GuideConfig cfg;
    cfg.kind = GuideKind::Policy;
    CHECK_THROWS_AS(roll_out(cfg, nullptr, o, d, kCalm), InvalidArgument);

    // Zero weights stand still: every interior waypoint equals the origin.
    const PolicyParams z = PolicyParams::zeros();
    const CoarseRoute still = roll_out(cfg, &z, o, d, kCalm);
    REQUIRE(still.waypoints.size() == 5);
    for (int k = 0; k < 4; ++k) CHECK(still.waypoints[k].same_position(o));
    CHECK(still.waypoints.back() == d);

    // n = 2 takes no policy step.
    cfg.waypoints = 2;
    const CoarseRoute direct = roll_out(cfg, &z, o, d, kCalm);
    REQUIRE(direct.waypoints.size() == 2);

    cfg.waypoints = 5;
    const PolicyParams p = PolicyParams::initialized(2);
    const double deltas[] = {100, -50};
    const CoarseRoute r1 = roll_out(cfg, &p, o, d, kCalm, deltas);
    const CoarseRoute r2 = roll_out(cfg, &p, o, d, kCalm, deltas);
    for (int k = 0; k < 5; ++k) CHECK(r1.waypoints[k] == r2.waypoints[k]);
    CHECK(r1.waypoints[1].alt_m == doctest::Approx(o.alt_m + 100));
    CHECK(r1.waypoints[3].alt_m == doctest::Approx(o.alt_m + 50));
    const double scale = step_scale(o, d, 5);
    for (int k = 1; k < 4; ++k)
        CHECK(great_circle_distance(r1.waypoints[k - 1], r1.waypoints[k]) <= scale * (1 + 1e-9));
}

TEST_CASE("guide kind names") {
    CHECK(to_string(GuideKind::Policy) == "policy");
    CHECK(guide_kind_from_string("great_circle") == GuideKind::GreatCircle);
    CHECK(guide_kind_from_string(to_string(GuideKind::Policy)) == GuideKind::Policy);
    CHECK_THROWS_AS(guide_kind_from_string("straight"), InvalidArgument);
}

TEST_CASE("checkpoint round trip is bit exact") {
    const fs::path path = fs::temp_directory_path() / "hfp_ckpt.json";
    PolicyParams p = PolicyParams::initialized(8);
    p.theta().tail<2>() << -0.25, 0.125;
    FeatureNormalization norm;
    norm.wind_scale_ms = 40;
    save_checkpoint(path, p, norm, {{"update_index", 3}});
    const PolicyCheckpoint c = load_checkpoint(path);
    CHECK(c.params.theta() == p.theta());
    CHECK(c.normalization == norm);
    CHECK(c.training.at("update_index") == 3);

    const FeatureVector f{0.2, 0.7, 0.1, -0.3, 0.05};
    CHECK(policy_action(c.params, f).raw == policy_action(p, f).raw);
    CHECK(c.params.value(f) == p.value(f));

    save_checkpoint(path, p, norm);
    CHECK(load_checkpoint(path).training.is_null());
}

TEST_CASE("checkpoint schema errors") {
    const PolicyParams p = PolicyParams::initialized(1);
    const nlohmann::json good = checkpoint_json(p, {});

    nlohmann::json j = good;
    j["schema_version"] = 2;
    CHECK_THROWS_AS(checkpoint_from_json(j), SchemaError);

    j = good;
    j["architecture"]["input_dim"] = 6;
    CHECK_THROWS_AS(checkpoint_from_json(j), SchemaError);

    j = good;
    j["weights"]["actor"].erase(0);
    CHECK_THROWS_AS(checkpoint_from_json(j), SchemaError);

    j = good;
    j["weights"].erase("critic");
    CHECK_THROWS_AS(checkpoint_from_json(j), SchemaError);

    j = good;
    j["normalization"]["wind_scale_ms"] = "fast";
    CHECK_THROWS_AS(checkpoint_from_json(j), SchemaError);

    const fs::path path = fs::temp_directory_path() / "hfp_ckpt_bad.json";
    std::ofstream(path) << "{";
    CHECK_THROWS_AS(load_checkpoint(path), SchemaError);
    CHECK_THROWS_AS(load_checkpoint(fs::temp_directory_path() / "hfp_no_such_ckpt.json"), IoError);
}
