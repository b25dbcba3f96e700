#include <doctest.h>

#include <cmath>
#include <random>

#include "hfp/errors.hpp"
#include "hfp/search.hpp"

using namespace hfp;

namespace {

const AircraftSpec kSpec{};
const WeatherField kCalm = make_uniform(0, 0, 288.15, kGlobalBox);

GeoPoint pt(double lat, double lon) { return GeoPoint::make(lat, lon, 10'668); }

WeatherField jet(std::uint64_t seed, double core_lat) {
    JetStreamParams p;
    p.seed = seed;
    p.core_lat_deg = core_lat;
    p.core_speed_ms = 80;
    p.half_width_deg = 4;
    return make_jet_stream({25, 75, -20, 40}, p);
}

CoarseRoute straight(const GeoPoint& a, const GeoPoint& b, int n) {
    CoarseRoute c;
    for (int k = 0; k < n; ++k) c.waypoints.push_back(intermediate_point(a, b, double(k) / (n - 1)));
    return c;
}

// Total nominal edge cost along a node path, summed forward.
double path_cost(const EdgeCostModel& m, const std::vector<NodeIndex>& path) {
    double c = 0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) c += m.edge_cost(path[k], path[k + 1]);
    return c;
}

}  // namespace

TEST_CASE("calm air follows the centerline") {
    const Lattice lat = build_lattice(pt(50, 8), pt(48, 2), {21, 11, 3});
    const SearchResult r = astar(lat, nullptr, kSpec, {lat.origin(), 65'000}, kCalm);
    REQUIRE(r.node_path.size() == 21);
    for (const NodeIndex& n : r.node_path) CHECK(n.j == 5);
    CHECK(r.geo_path.front().same_position(lat.origin()));
    CHECK(r.geo_path.back().same_position(lat.destination()));
    CHECK(r.total_fuel_kg > 0);
    CHECK(r.expanded_nodes > 0);
}

TEST_CASE("path shape and corridor containment") {
    const Lattice lat = build_lattice(pt(52, -1), pt(47, 15), {31, 11, 3});
    const WeatherField f = jet(3, 50);
    CoarseRoute c = straight(lat.origin(), lat.destination(), 5);
    c.waypoints[2] = GeoPoint::make(c.waypoints[2].lat_deg + 1.0, c.waypoints[2].lon_deg);
    for (int w : {1, 3, 5, 7}) {
        const Corridor cor = build_corridor(lat, c, w);
        const SearchResult r = astar(lat, &cor, kSpec, {lat.origin(), 65'000}, f);
        REQUIRE(r.node_path.size() == 31);
        CHECK(r.node_path.front() == cor.start_node);
        for (std::size_t k = 0; k < r.node_path.size(); ++k) {
            CHECK(r.node_path[k].i == static_cast<int>(k));
            CHECK(cor.is_reachable(r.node_path[k]));
            if (k > 0) {
                CHECK(std::abs(r.node_path[k].j - r.node_path[k - 1].j) <= 1);
                CHECK(std::abs(r.node_path[k].h - r.node_path[k - 1].h) <= 1);
            }
        }
        const EdgeCostModel m(lat, kSpec, {lat.origin(), 65'000}, f);
        CHECK(r.search_cost_kg == doctest::Approx(path_cost(m, r.node_path)).epsilon(1e-12));
        const RouteCost rc = route_cost(kSpec, {lat.origin(), 65'000}, r.geo_path, f);
        CHECK(r.total_fuel_kg == rc.total_fuel_kg);
    }
}

TEST_CASE("full-width corridor equals the unconstrained search") {
    const Lattice lat = build_lattice(pt(40, -4), pt(52, 13), {21, 9, 3});
    const WeatherField f = jet(5, 46);
    const Corridor cor = build_corridor(lat, straight(lat.origin(), lat.destination(), 5), 9);
    const SearchResult a = astar(lat, nullptr, kSpec, {lat.origin(), 65'000}, f);
    const SearchResult b = astar(lat, &cor, kSpec, {lat.origin(), 65'000}, f);
    CHECK(a.search_cost_kg == b.search_cost_kg);
    CHECK(a.expanded_nodes == b.expanded_nodes);
    REQUIRE(a.node_path.size() == b.node_path.size());
    for (std::size_t k = 0; k < a.node_path.size(); ++k) CHECK(a.node_path[k] == b.node_path[k]);
}

TEST_CASE("A* matches the exhaustive oracle on random lattices") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> rows(3, 25), half_cols(0, 6), levels(1, 3), width(1, 13);
    std::uniform_real_distribution<double> lat(38, 60), lon(-8, 30), core(40, 60);
    int compared = 0;
    while (compared < 40) {
        const GeoPoint a = pt(lat(rng), lon(rng)), b = pt(lat(rng), lon(rng));
        const double d = great_circle_distance(a, b);
        if (d < 300e3 || d > 2500e3) continue;
        const LatticeDims dims{rows(rng), 2 * half_cols(rng) + 1, levels(rng)};
        const Lattice L = build_lattice(a, b, dims);
        const WeatherField f = jet(rng(), core(rng));
        const AircraftState s0{a, 70'000};

        const SearchResult x = astar(L, nullptr, kSpec, s0, f);
        const SearchResult y = dp_oracle(L, nullptr, kSpec, s0, f);
        CHECK(x.search_cost_kg == doctest::Approx(y.search_cost_kg).epsilon(1e-12));

        const int w = std::min(width(rng), dims.columns) | 1;
        CoarseRoute c = straight(a, b, 5);
        c.waypoints[2] = GeoPoint::make(c.waypoints[2].lat_deg + 0.5, c.waypoints[2].lon_deg - 0.5);
        const Corridor cor = build_corridor(L, c, w);
        const SearchResult xc = astar(L, &cor, kSpec, s0, f);
        const SearchResult yc = dp_oracle(L, &cor, kSpec, s0, f);
        CHECK(xc.search_cost_kg == doctest::Approx(yc.search_cost_kg).epsilon(1e-12));
        CHECK(xc.search_cost_kg >= x.search_cost_kg * (1 - 1e-12));
        ++compared;
    }
}

TEST_CASE("heuristic never overestimates the cost to go") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 6; ++t) {
        const Lattice L = build_lattice(pt(45 + t, -3), pt(50 - t, 14), {15, 7, 3});
        const WeatherField f = jet(rng(), 44 + 2 * t);
        const EdgeCostModel m(L, kSpec, {L.origin(), 66'000}, f);
        const std::vector<double> ctg = cost_to_go(m, nullptr);
        for (std::size_t k = 0; k < L.size(); ++k) {
            const NodeIndex n = L.unflat(k);
            CHECK(m.heuristic(n) <= ctg[k] * (1 + 1e-12));
        }
        CHECK(m.heuristic({14, 3, 1}) == 0.0);
        CHECK(m.min_specific_burn() > 0);
    }
}

TEST_CASE("nominal mass decreases along the centerline") {
    const Lattice L = build_lattice(pt(48, 2), pt(52, 21), {11, 5, 1});
    const EdgeCostModel m(L, kSpec, {L.origin(), 64'000}, kCalm);
    CHECK(m.nominal_mass().front() == 64'000);
    for (std::size_t i = 1; i < m.nominal_mass().size(); ++i) CHECK(m.nominal_mass()[i] < m.nominal_mass()[i - 1]);
}

TEST_CASE("narrow corridors expand no more nodes") {
    const Lattice L = build_lattice(pt(51.5, -0.5), pt(48.1, 16.6), {41, 11, 3});
    const WeatherField f = jet(17, 50);
    const SearchResult full = astar(L, nullptr, kSpec, {L.origin(), 65'000}, f);
    const CoarseRoute c = straight(L.origin(), L.destination(), 5);
    for (int w : {1, 3, 5}) {
        const Corridor cor = build_corridor(L, c, w);
        const SearchResult r = astar(L, &cor, kSpec, {L.origin(), 65'000}, f);
        CHECK(r.expanded_nodes <= full.expanded_nodes);
        CHECK(r.search_cost_kg >= full.search_cost_kg * (1 - 1e-12));
    }
}

TEST_CASE("disconnected corridor and oracle size limit") {
    const Lattice L = build_lattice(pt(50, 8), pt(48, 2), {9, 11, 1});
    Corridor cor = full_corridor(L);
    cor.width = 1;
    for (int i = 1; i < 8; ++i) cor.windows[i] = i < 4 ? Corridor::Window{0, 0} : Corridor::Window{10, 10};
    cor.start_node = {0, 0, 0};
    CHECK_THROWS_AS(astar(L, &cor, kSpec, {L.origin(), 65'000}, kCalm), NoPath);
    CHECK_THROWS_AS(dp_oracle(L, &cor, kSpec, {L.origin(), 65'000}, kCalm), NoPath);

    const Lattice other = build_lattice(pt(50, 8), pt(48, 2), {5, 11, 1});
    CHECK_THROWS_AS(astar(other, &cor, kSpec, {other.origin(), 65'000}, kCalm), InvalidArgument);

    const Lattice big = build_lattice(pt(50, 8), pt(48, 2), {1001, 17, 3});
    CHECK_THROWS_AS(dp_oracle(big, nullptr, kSpec, {big.origin(), 65'000}, kCalm), InvalidArgument);
}
