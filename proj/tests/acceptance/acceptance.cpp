// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfp/errors.hpp"
#include "hfp/harness.hpp"
#include "hfp/trainer.hpp"

namespace fs = std::filesystem;
using namespace hfp;

namespace {

constexpr BoundingBox kTripBox{34.0, 71.0, -10.0, 35.0};
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Instance {
    RoutePair route;
    std::shared_ptr<const WeatherField> field;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Strong, narrow jet whose core runs along the trip's mid-latitude: the
// regime where leaving the great circle can pay off.
std::shared_ptr<const WeatherField> jet(std::uint64_t seed, const RoutePair& trip) {
    JetStreamParams p;
    p.seed = seed;
    p.core_speed_ms = 80.0;
    p.half_width_deg = 4.0;
    p.core_lat_deg = 0.5 * (trip.origin.lat_deg + trip.destination.lat_deg);
    return std::make_shared<const WeatherField>(make_jet_stream(kEuropeWeatherBox, p));
}

// Random European trips, each with its own seeded jet stream.
std::vector<Instance> instances(int count, std::uint64_t seed, double min_m = 400e3, double max_m = 2500e3) {
    std::vector<Instance> out;
    int k = 0;
    for (RoutePair& r : random_route_set(count, seed, kTripBox, min_m, max_m)) {
        auto field = jet(seed * 1000 + static_cast<std::uint64_t>(k++), r);
        out.push_back({std::move(r), std::move(field)});
    }
    return out;
}

bool leaves_centerline(const SearchResult& r, int center) {
    return std::any_of(r.node_path.begin(), r.node_path.end(), [&](const NodeIndex& n) { return n.j != center; });
}

PlanResult run(const Instance& inst, GuideMode guide, int width, const LatticeDims& dims = {41, 11, 3},
               const PolicyParams* policy = nullptr) {
    PlanRequest req;
    req.origin = inst.route.origin;
    req.destination = inst.route.destination;
    req.dims = dims;
    req.width = width;
    req.guide = guide;
    return plan(req, AircraftSpec{}, *inst.field, policy);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1 and 8: w = J reproduces the unconstrained search.
Outcome full_width(GuideMode guide, const PolicyParams* policy) {
    const auto t0 = std::chrono::steady_clock::now();
    int identical = 0;
    const auto insts = instances(10, kSeed + 1);
    for (const Instance& inst : insts) {
        const PlanResult solver = run(inst, GuideMode::None, 11);
        const PlanResult hybrid = run(inst, guide, 11, {41, 11, 3}, policy);
        if (solver.search.node_path == hybrid.search.node_path &&
            solver.search.total_fuel_kg == hybrid.search.total_fuel_kg)
            ++identical;
    }
    const double elapsed = seconds_since(t0);
    return {identical == 10 && elapsed < 120.0,
            std::to_string(identical) + "/10 identical paths and fuel, " + fmt("%.1f s", elapsed)};
}

// 3 and 8: fuel ratio hybrid / unconstrained at w = 5.
Outcome fuel_parity(GuideMode guide, const PolicyParams* policy, double bound, int needed, double median_bound,
                    const fs::path& csv) {
    std::ofstream out(csv);
    out << "instance,trip_km,fuel_solver_kg,fuel_hybrid_kg,ratio\n";
    std::vector<double> ratios;
    int off_center = 0;
    const auto insts = instances(20, kSeed + 3);
    for (std::size_t k = 0; k < insts.size(); ++k) {
        const PlanResult solver = run(insts[k], GuideMode::None, 11);
        const PlanResult hybrid = run(insts[k], guide, 5, {41, 11, 3}, policy);
        const double ratio = hybrid.search.total_fuel_kg / solver.search.total_fuel_kg;
        ratios.push_back(ratio);
        off_center += leaves_centerline(solver.search, 5);
        out << k << "," << great_circle_distance(insts[k].route.origin, insts[k].route.destination) / 1e3 << ","
            << solver.search.total_fuel_kg << "," << hybrid.search.total_fuel_kg << "," << ratio << "\n";
    }
    const auto within = std::count_if(ratios.begin(), ratios.end(), [&](double r) { return r <= bound; });
    const double med = median(ratios);
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    const bool pass = within >= needed && (median_bound <= 0.0 || med <= median_bound);
    return {pass, std::to_string(within) + "/20 within " + fmt("%.3f", bound) + "x (need " + std::to_string(needed) +
                      "), median ratio " + fmt("%.6f", med) + ", worst " + fmt("%.6f", worst) + ", " +
                      std::to_string(off_center) + "/20 optima leave the centerline"};
}

Outcome oracle_optimality() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(kSeed + 2);
    std::uniform_int_distribution<int> rows(2, 41), half_cols(0, 7), levels(1, 5);
    int equal = 0;
    int total = 0;
    const auto insts = instances(50, kSeed + 2, 300e3, 2500e3);
    for (const Instance& inst : insts) {
        const LatticeDims dims{rows(rng), 2 * half_cols(rng) + 1, levels(rng)};
        const Lattice lattice = build_lattice(inst.route.origin, inst.route.destination, dims);
        const AircraftState initial{inst.route.origin, AircraftSpec{}.ref_mass_kg};
        const SearchResult a = astar(lattice, nullptr, AircraftSpec{}, initial, *inst.field);
        const SearchResult d = dp_oracle(lattice, nullptr, AircraftSpec{}, initial, *inst.field);
        ++total;
        const bool same_cost = a.search_cost_kg == d.search_cost_kg;
        const bool same_fuel = a.node_path == d.node_path ? a.total_fuel_kg == d.total_fuel_kg : same_cost;
        if (same_cost && same_fuel) ++equal;
    }
    const double elapsed = seconds_since(t0);
    return {equal == total && elapsed < 300.0,
            std::to_string(equal) + "/" + std::to_string(total) + " exact matches, " + fmt("%.1f s", elapsed)};
}

Outcome search_effort(const fs::path& dir) {
    const auto insts = instances(10, kSeed + 4);
    auto mean_ratio = [&](int fwd) {
        double sum = 0.0;
        for (const Instance& inst : insts) {
            const PlanResult solver = run(inst, GuideMode::None, 11, {fwd, 11, 3});
            const PlanResult hybrid = run(inst, GuideMode::GreatCircle, 5, {fwd, 11, 3});
            sum += static_cast<double>(hybrid.search.expanded_nodes) / static_cast<double>(solver.search.expanded_nodes);
        }
        return sum / static_cast<double>(insts.size());
    };
    const double r21 = mean_ratio(21), r41 = mean_ratio(41), r51 = mean_ratio(51);

    // Reported, not gated: the wall-time sweep on the default route set.
    const std::vector<int> fwd{11, 21, 31, 41, 51};
    const auto routes = default_route_set();
    const auto field = jet(kSeed, routes.front());
    write_bench_csv(dir / "bench_fwd.csv", bench_fwd(routes, fwd, BenchOptions{}, AircraftSpec{}, *field));

    return {r41 <= 0.60 && r51 <= r21, "expanded ratio " + fmt("%.3f", r41) + " at 41 FWD (<= 0.60), " +
                                            fmt("%.3f", r21) + " at 21, " + fmt("%.3f", r51) + " at 51"};
}

Outcome width_plateau(const fs::path& dir) {
    const auto routes = parse_route_set("FRA-CDG,LHR-VIE");
    std::vector<int> widths(11);
    std::iota(widths.begin(), widths.end(), 1);
    WidthSweep sweep;
    for (const RoutePair& r : routes) {
        const auto field = jet(kSeed + 5, r);
        const WidthSweep one = bench_width(std::span(&r, 1), widths, BenchOptions{}, AircraftSpec{}, *field);
        sweep.per_route.insert(sweep.per_route.end(), one.per_route.begin(), one.per_route.end());
        sweep.rows.insert(sweep.rows.end(), one.rows.begin(), one.rows.end());
    }
    write_bench_csv(dir / "bench_width.csv", sweep.rows);
    write_bench_route_csv(dir / "bench_width_routes.csv", sweep.per_route);

    bool pass = sweep.per_route.size() == 22;
    std::string detail;
    for (const RoutePair& r : routes) {
        std::vector<BenchRouteRow> rows;
        for (const auto& row : sweep.per_route)
            if (row.route == r.name) rows.push_back(row);
        bool fuel_monotone = true, expanded_increasing = true;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            fuel_monotone = fuel_monotone && rows[k].fuel_kg <= rows[k - 1].fuel_kg;
            expanded_increasing = expanded_increasing && rows[k].expanded > rows[k - 1].expanded;
        }
        const double gap = rows.size() == 11 ? (rows[4].fuel_kg / rows[10].fuel_kg - 1.0) * 100.0 : 1e9;
        pass = pass && fuel_monotone && expanded_increasing && gap <= 0.1;
        const double km = great_circle_distance(r.origin, r.destination) / 1e3;
        if (!detail.empty()) detail += "; ";
        detail += r.name + fmt(" (%.0f km): ", km) + (fuel_monotone ? "fuel non-increasing" : "fuel NOT monotone") +
                  ", w5 vs w11 " + fmt("%+.4f%%", gap) + ", " +
                  (expanded_increasing ? "expansions increasing" : "expansions NOT increasing");
    }
    return {pass, detail};
}

Outcome reward_identities() {
    const double lam = 0.01;
    const PlaneVector d{3.0e5, 4.0e5};
    bool ok = true;
    auto near = [&](double a, double b) { ok = ok && std::abs(a - b) <= 1e-9; };
    near(progress_value({6.0e4, 8.0e4}, d, lam), 1.0 - lam);
    near(progress_value({-8.0e4, 6.0e4}, d, lam), -lam);
    near(progress_value({-6.0e4, -8.0e4}, d, lam), 1.0 - lam);
    near(progress_value({0.0, 0.0}, d, lam), -lam);
    near(step_reward(1.0 - lam, 100.0, 2.0), -0.01);
    near(step_reward(-lam, 100.0, 2.0), -102.01);
    near(step_reward(0.3, 0.0, 2.0), 0.0);
    near(end_reward(0.0, 0.5), 2.0);
    near(end_reward(0.5, 0.5), 1.0);
    near(end_reward(1.0, 0.5), -5.0);
    return {ok, "V, step reward and end reward (D in {0, T, 1}) within 1e-9"};
}

struct Training {
    TrainResult result;
    double seconds = 0.0;
};

Training desk_training(const TrainConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Training t{train(cfg, AircraftSpec{}, uniform_field_generator()), 0.0};
    t.seconds = seconds_since(t0);
    return t;
}

std::pair<double, double> decile_means(const std::vector<EpisodeSummary>& eps, bool first, bool reward) {
    const std::size_t n = std::max<std::size_t>(1, eps.size() / 10);
    const std::size_t begin = first ? 0 : eps.size() - n;
    double sum = 0.0;
    for (std::size_t k = begin; k < begin + n; ++k) sum += reward ? eps[k].total_reward : eps[k].final_distance;
    return {sum / static_cast<double>(n), static_cast<double>(n)};
}

Outcome learning_signal(const Training& t) {
    const auto& eps = t.result.episodes;
    const double r0 = decile_means(eps, true, true).first, r1 = decile_means(eps, false, true).first;
    const double d0 = decile_means(eps, true, false).first, d1 = decile_means(eps, false, false).first;
    const bool pass = r1 > r0 && d1 < 0.7 * d0 && t.seconds <= 1800.0;
    return {pass, "reward first/last decile " + fmt("%.2f", r0) + " / " + fmt("%.2f", r1) + ", final distance " +
                      fmt("%.3f", d0) + " / " + fmt("%.3f", d1) + " (need < " + fmt("%.3f", 0.7 * d0) + "), " +
                      std::to_string(eps.size()) + " episodes in " + fmt("%.1f s", t.seconds)};
}

Outcome policy_pipeline(const PolicyParams& policy, const fs::path& dir) {
    save_checkpoint(dir / "desk_checkpoint.json", policy, {});
    const PolicyParams loaded = load_checkpoint(dir / "desk_checkpoint.json").params;

    double worst_guide = 0.0;
    for (const Instance& inst : instances(5, kSeed + 8)) {
        const PlanResult r = run(inst, GuideMode::Policy, 5, {41, 11, 3}, &loaded);
        worst_guide = std::max(worst_guide, r.guide_time_s);
    }
    const Outcome c1 = full_width(GuideMode::Policy, &loaded);
    const Outcome c3 = fuel_parity(GuideMode::Policy, &loaded, 1.02, 16, 0.0, dir / "fuel_parity_policy.csv");
    return {worst_guide <= 2.0 && c1.pass && c3.pass, "guide inference max " + fmt("%.4f s", worst_guide) +
                                                          "; full width: " + c1.detail + "; parity: " + c3.detail};
}

Outcome determinism(const TrainConfig& cfg, const fs::path& dir) {
    const auto insts = instances(3, kSeed + 9);
    bool routes_equal = true;
    for (const Instance& inst : insts) {
        PlanRequest req;
        req.origin = inst.route.origin;
        req.destination = inst.route.destination;
        req.seed = 5;
        const std::string a = route_json(req, plan(req, AircraftSpec{}, *inst.field), false).dump();
        const std::string b = route_json(req, plan(req, AircraftSpec{}, *inst.field), false).dump();
        routes_equal = routes_equal && a == b;
    }

    auto log_text = [&](const TrainResult& r) {
        std::string s = format_log_header() + "\n";
        for (const auto& row : r.log) s += format_log_row(row) + "\n";
        return s + checkpoint_json(r.state.params, {}, training_state_json(r.state)).dump();
    };
    const std::string first = log_text(desk_training(cfg).result);
    const std::string second = log_text(desk_training(cfg).result);
    std::ofstream(dir / "determinism_train_log.csv") << first;
    return {routes_equal && first == second, std::string("route JSON ") + (routes_equal ? "identical" : "DIFFERS") +
                                                 ", training log + checkpoint " +
                                                 (first == second ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path dir = "acceptance_out";
    for (int k = 1; k + 1 < argc; ++k)
        if (std::string(argv[k]) == "--out-dir") dir = argv[k + 1];
    fs::create_directories(dir);

    int failed = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    };

    TrainConfig desk;
    desk.instances = 2000;
    desk.seed = 7;
    std::optional<Training> trained;

    report(1, "full-width equivalence", [] { return full_width(GuideMode::GreatCircle, nullptr); });
    report(2, "oracle optimality", oracle_optimality);
    report(3, "fuel parity", [&] { return fuel_parity(GuideMode::GreatCircle, nullptr, 1.01, 18, 1.005, dir / "fuel_parity.csv"); });
    report(4, "search-effort reduction", [&] { return search_effort(dir); });
    report(5, "width plateau", [&] { return width_plateau(dir); });
    report(6, "reward identities", reward_identities);
    report(7, "PPO learning signal", [&] {
        trained = desk_training(desk);
        std::ofstream log(dir / "desk_train_log.csv");
        log << format_log_header() << "\n";
        for (const auto& row : trained->result.log) log << format_log_row(row) << "\n";
        return learning_signal(*trained);
    });
    report(8, "policy-guide pipeline", [&] {
        if (!trained) trained = desk_training(desk);
        return policy_pipeline(trained->result.state.params, dir);
    });
    report(9, "determinism", [&] { return determinism(desk, dir); });

    // Not a criterion: the same desk run at a larger learning rate shows the
    // trainer does learn when given enough step size.
    try {
        TrainConfig fast = desk;
        fast.learning_rate = 3e-4;
        const Training t = desk_training(fast);
        std::printf("INFO  desk training at lr 3e-4 (not gated): %s\n", learning_signal(t).detail.c_str());
    } catch (const std::exception& e) {
        std::printf("INFO  desk training at lr 3e-4 failed: %s\n", e.what());
    }

    std::printf("%d of 9 criteria failed\n", failed);
    return failed;
}
