#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfp/guide.hpp"
#include "hfp/lattice.hpp"
#include "hfp/perfmodel.hpp"
#include "hfp/search.hpp"
#include "hfp/weather.hpp"

namespace hfp {

/// Cruise altitude given to trip endpoints (FL350).
inline constexpr double kCruiseAltM = 10'668.0;

struct Airport {
    const char* code;
    double lat_deg;
    double lon_deg;
};

std::span<const Airport> airports();
std::optional<GeoPoint> find_airport(const std::string& code, double alt_m = kCruiseAltM);

/// Accepts an airport code ("FRA") or "lat,lon" in degrees.
GeoPoint parse_location(const std::string& text, double alt_m = kCruiseAltM);

struct RoutePair {
    std::string name;
    GeoPoint origin;
    GeoPoint destination;
};

/// Five documented airport pairs of mixed length (about 450 to 2,750 km).
std::vector<RoutePair> default_route_set();

/// Comma-separated "ORG-DST" pairs, e.g. "FRA-CDG,LHR-VIE".
std::vector<RoutePair> parse_route_set(const std::string& text);

/// Seeded random pairs in the box with trip lengths in [min_m, max_m].
std::vector<RoutePair> random_route_set(int count, std::uint64_t seed, const BoundingBox& box, double min_m,
                                        double max_m);

/// Area covered by generated weather: wide enough for any European lattice.
inline constexpr BoundingBox kEuropeWeatherBox{20.0, 80.0, -45.0, 65.0};

/// "uniform" (calm ISA, global), "jet" (seeded jet stream over Europe) or
/// "csv:<path>".
std::shared_ptr<const WeatherField> make_weather(const std::string& source, std::uint64_t seed);

enum class GuideMode { Policy, GreatCircle, None };

std::string to_string(GuideMode mode);
GuideMode guide_mode_from_string(const std::string& s);

struct PlanRequest {
    GeoPoint origin;
    GeoPoint destination;
    LatticeDims dims{41, 11, 3};
    int width = 5;
    GuideMode guide = GuideMode::GreatCircle;
    int waypoints = 5;
    int substeps = 4;
    std::uint64_t seed = 0;
};

struct PlanResult {
    SearchResult search;
    std::optional<CoarseRoute> coarse;
    std::optional<Corridor> corridor;
    double guide_time_s = 0.0;
    double corridor_time_s = 0.0;
    double search_time_s = 0.0;

    double total_time_s() const { return guide_time_s + corridor_time_s + search_time_s; }
};

/// Guide rollout (skipped for GuideMode::None), corridor, then A*.
/// `policy` is required for GuideMode::Policy.
PlanResult plan(const PlanRequest& req, const AircraftSpec& spec, const WeatherField& field,
                const PolicyParams* policy = nullptr);

/// Route document with sorted keys. Wall-clock values live only under
/// "timings", which is omitted when `with_timings` is false.
nlohmann::json route_json(const PlanRequest& req, const PlanResult& result, bool with_timings = true);

struct BenchOptions {
    GuideMode guide = GuideMode::GreatCircle;
    const PolicyParams* policy = nullptr;
    LatticeDims dims{41, 11, 3};
    int width = 5;
    int repetitions = 1;
    int waypoints = 5;
    int substeps = 4;
};

/// One row of a sensitivity sweep, averaged over routes and repetitions.
struct BenchRow {
    int param = 0;  // FWD points or width
    double solver_time_s = 0.0;
    double solver_time_sd = 0.0;
    double hybrid_time_s = 0.0;
    double hybrid_time_sd = 0.0;
    double guide_time_s = 0.0;
    double corridor_time_s = 0.0;
    double search_time_s = 0.0;
    double fuel_solver_kg = 0.0;
    double fuel_hybrid_kg = 0.0;
    double expanded_solver = 0.0;
    double expanded_hybrid = 0.0;
    double pct_diff = 0.0;
    int runs = 0;
    int failures = 0;
    std::string error;
};

/// Per-route values of a width sweep.
struct BenchRouteRow {
    int width = 0;
    std::string route;
    double fuel_kg = 0.0;
    double time_s = 0.0;
    double expanded = 0.0;
};

struct WidthSweep {
    std::vector<BenchRow> rows;
    std::vector<BenchRouteRow> per_route;
};

double pct_diff(double hybrid_time_s, double solver_time_s);

std::vector<BenchRow> bench_fwd(std::span<const RoutePair> routes, std::span<const int> fwd_list,
                                const BenchOptions& opts, const AircraftSpec& spec, const WeatherField& field);

WidthSweep bench_width(std::span<const RoutePair> routes, std::span<const int> width_list, const BenchOptions& opts,
                       const AircraftSpec& spec, const WeatherField& field);

std::string bench_csv_header();
std::string bench_route_csv_header();
void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows);
std::vector<BenchRow> read_bench_csv(const std::filesystem::path& path);
void write_bench_route_csv(const std::filesystem::path& path, std::span<const BenchRouteRow> rows);
std::vector<BenchRouteRow> read_bench_route_csv(const std::filesystem::path& path);

}  // namespace hfp
