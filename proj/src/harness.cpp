#include "hfp/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hfp/errors.hpp"

namespace hfp {

namespace {

// Airport reference points (degrees). Fixture data, rounded to 1e-4.
constexpr std::array<Airport, 20> kAirports{{
    {"AMS", 52.3105, 4.7683},  {"ARN", 59.6498, 17.9238}, {"BCN", 41.2974, 2.0833},  {"BER", 52.3667, 13.5033},
    {"BRU", 50.9010, 4.4844},  {"BUD", 47.4298, 19.2611}, {"CDG", 49.0097, 2.5479},  {"CPH", 55.6180, 12.6508},
    {"FCO", 41.8003, 12.2389}, {"FRA", 50.0379, 8.5622},  {"LHR", 51.4700, -0.4543}, {"LIS", 38.7742, -9.1342},
    {"MAD", 40.4983, -3.5676}, {"MUC", 48.3537, 11.7750}, {"OTP", 44.5711, 26.0850}, {"PRG", 50.1008, 14.2600},
    {"VIE", 48.1103, 16.5697}, {"WAW", 52.1657, 20.9671}, {"ZAG", 45.7429, 16.0688}, {"ZRH", 47.4582, 8.5555},
}};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, const std::string& source, std::size_t line) {
    double v = 0.0;
    const std::string t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ParseError(source, line, "not a number: '" + text + "'");
    return v;
}

std::string num(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Stats {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double sd() const {
        if (n < 2) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
    }
};

struct RunOutcome {
    double solver_time_s;
    double hybrid_time_s;
    double guide_time_s;
    double corridor_time_s;
    double search_time_s;
    double fuel_solver_kg;
    double fuel_hybrid_kg;
    double expanded_solver;
    double expanded_hybrid;
};

RunOutcome run_pair(const RoutePair& route, const LatticeDims& dims, int width, const BenchOptions& opts,
                    const AircraftSpec& spec, const WeatherField& field) {
    PlanRequest req{route.origin, route.destination, dims, width, GuideMode::None, opts.waypoints, opts.substeps, 0};
    const PlanResult solver = plan(req, spec, field, opts.policy);
    req.guide = opts.guide;
    const PlanResult hybrid = plan(req, spec, field, opts.policy);
    return {solver.total_time_s(),
            hybrid.total_time_s(),
            hybrid.guide_time_s,
            hybrid.corridor_time_s,
            hybrid.search_time_s,
            solver.search.total_fuel_kg,
            hybrid.search.total_fuel_kg,
            static_cast<double>(solver.search.expanded_nodes),
            static_cast<double>(hybrid.search.expanded_nodes)};
}

BenchRow summarize(int param, const std::vector<RunOutcome>& runs, int failures, std::string error) {
    Stats solver, hybrid, guide, corridor, search, fs, fh, es, eh;
    for (const RunOutcome& r : runs) {
        solver.add(r.solver_time_s);
        hybrid.add(r.hybrid_time_s);
        guide.add(r.guide_time_s);
        corridor.add(r.corridor_time_s);
        search.add(r.search_time_s);
        fs.add(r.fuel_solver_kg);
        fh.add(r.fuel_hybrid_kg);
        es.add(r.expanded_solver);
        eh.add(r.expanded_hybrid);
    }
    BenchRow row;
    row.param = param;
    row.solver_time_s = solver.mean();
    row.solver_time_sd = solver.sd();
    row.hybrid_time_s = hybrid.mean();
    row.hybrid_time_sd = hybrid.sd();
    row.guide_time_s = guide.mean();
    row.corridor_time_s = corridor.mean();
    row.search_time_s = search.mean();
    row.fuel_solver_kg = fs.mean();
    row.fuel_hybrid_kg = fh.mean();
    row.expanded_solver = es.mean();
    row.expanded_hybrid = eh.mean();
    row.pct_diff = runs.empty() ? 0.0 : pct_diff(row.hybrid_time_s, row.solver_time_s);
    row.runs = static_cast<int>(runs.size());
    row.failures = failures;
    row.error = std::move(error);
    return row;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cells.back() += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else if (c != '\r') {
            cells.back() += c;
        }
    }
    return cells;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw SchemaError(path.string() + ": unexpected header");
    const std::size_t columns = split_csv(header).size();
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != columns)
            throw ParseError(path.string(), lineno, "expected " + std::to_string(columns) + " fields");
        rows.push_back(std::move(cells));
    }
    return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::span<const Airport> airports() { return kAirports; }

std::optional<GeoPoint> find_airport(const std::string& code, double alt_m) {
    std::string upper = code;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (const Airport& a : kAirports)
        if (upper == a.code) return GeoPoint::make(a.lat_deg, a.lon_deg, alt_m);
    return std::nullopt;
}

GeoPoint parse_location(const std::string& text, double alt_m) {
    const std::string t = trim(text);
    if (auto a = find_airport(t, alt_m)) return *a;
    const auto parts = split(t, ',');
    if (parts.size() != 2) throw InvalidArgument("location '" + text + "' is neither an airport code nor lat,lon");
    try {
        return GeoPoint::make(parse_double(parts[0], "location", 1), parse_double(parts[1], "location", 1), alt_m);
    } catch (const ParseError&) {
        throw InvalidArgument("location '" + text + "' is neither an airport code nor lat,lon");
    }
}

std::vector<RoutePair> default_route_set() {
    return parse_route_set("FRA-CDG,LHR-VIE,MAD-BRU,ARN-BUD,LIS-WAW");
}

std::vector<RoutePair> parse_route_set(const std::string& text) {
    std::vector<RoutePair> routes;
    for (const std::string& item : split(text, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        const auto dash = t.find('-');
        if (dash == std::string::npos) throw InvalidArgument("route '" + t + "' is not ORG-DST");
        const auto o = find_airport(t.substr(0, dash));
        const auto d = find_airport(t.substr(dash + 1));
        if (!o || !d) throw InvalidArgument("route '" + t + "' uses an unknown airport code");
        if (o->same_position(*d)) throw DegenerateTrip("route '" + t + "' starts and ends at the same airport");
        routes.push_back({t, *o, *d});
    }
    if (routes.empty()) throw InvalidArgument("route set is empty");
    return routes;
}

std::vector<RoutePair> random_route_set(int count, std::uint64_t seed, const BoundingBox& box, double min_m,
                                        double max_m) {
    box.validate();
    if (!(min_m >= 0.0 && max_m > min_m)) throw InvalidArgument("trip length range invalid");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat(box.lat_min, box.lat_max);
    std::uniform_real_distribution<double> lon(box.lon_min, box.lon_max);
    std::vector<RoutePair> routes;
    for (int k = 0; k < count; ++k) {
        for (int attempt = 0;; ++attempt) {
            if (attempt == 10'000) throw SamplingExhausted("no pair in the requested length range");
            const GeoPoint o = GeoPoint::make(lat(rng), lon(rng), kCruiseAltM);
            const GeoPoint d = GeoPoint::make(lat(rng), lon(rng), kCruiseAltM);
            const double dist = great_circle_distance(o, d);
            if (dist >= min_m && dist <= max_m) {
                routes.push_back({"R" + std::to_string(k), o, d});
                break;
            }
        }
    }
    return routes;
}

std::shared_ptr<const WeatherField> make_weather(const std::string& source, std::uint64_t seed) {
    if (source == "uniform") return std::make_shared<const WeatherField>(make_uniform(0.0, 0.0, kIsaSeaLevelK, kGlobalBox));
    if (source == "jet") {
        JetStreamParams p;
        p.seed = seed;
        return std::make_shared<const WeatherField>(make_jet_stream(kEuropeWeatherBox, p));
    }
    if (source.rfind("csv:", 0) == 0) return std::make_shared<const WeatherField>(load_csv(source.substr(4)));
    throw InvalidArgument("unknown weather source '" + source + "' (expected uniform, jet or csv:<path>)");
}

std::string to_string(GuideMode mode) {
    switch (mode) {
        case GuideMode::Policy: return "policy";
        case GuideMode::GreatCircle: return "great_circle";
        case GuideMode::None: return "none";
    }
    return "none";
}

GuideMode guide_mode_from_string(const std::string& s) {
    if (s == "policy") return GuideMode::Policy;
    if (s == "great_circle") return GuideMode::GreatCircle;
    if (s == "none") return GuideMode::None;
    throw InvalidArgument("unknown guide '" + s + "' (expected policy, great_circle or none)");
}

PlanResult plan(const PlanRequest& req, const AircraftSpec& spec, const WeatherField& field,
                const PolicyParams* policy) {
    if (req.guide == GuideMode::Policy && policy == nullptr)
        throw InvalidArgument("policy guide requested without a checkpoint");
    if (req.substeps < 1) throw InvalidArgument("substeps must be >= 1");

    const Lattice lattice = build_lattice(req.origin, req.destination, req.dims);
    const AircraftState initial{req.origin, spec.ref_mass_kg};
    PlanResult result;

    if (req.guide != GuideMode::None) {
        auto t0 = std::chrono::steady_clock::now();
        GuideConfig cfg;
        cfg.waypoints = req.waypoints;
        cfg.kind = req.guide == GuideMode::Policy ? GuideKind::Policy : GuideKind::GreatCircle;
        result.coarse = roll_out(cfg, policy, req.origin, req.destination, field, {});
        result.guide_time_s = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        result.corridor = build_corridor(lattice, *result.coarse, req.width);
        result.corridor_time_s = seconds_since(t0);
    }

    const auto t0 = std::chrono::steady_clock::now();
    result.search = astar(lattice, result.corridor ? &*result.corridor : nullptr, spec, initial, field, req.substeps);
    result.search_time_s = seconds_since(t0);
    return result;
}

nlohmann::json route_json(const PlanRequest& req, const PlanResult& result, bool with_timings) {
    auto point = [](const GeoPoint& p) { return nlohmann::json{{"lat_deg", p.lat_deg}, {"lon_deg", p.lon_deg}, {"alt_m", p.alt_m}}; };
    nlohmann::json j;
    j["request"] = {{"origin", point(req.origin)},
                    {"destination", point(req.destination)},
                    {"dims", {req.dims.rows, req.dims.columns, req.dims.levels}},
                    {"width", req.width},
                    {"guide", to_string(req.guide)},
                    {"waypoints", req.waypoints},
                    {"substeps", req.substeps},
                    {"seed", req.seed}};

    nlohmann::json waypoints = nlohmann::json::array();
    for (std::size_t k = 0; k < result.search.geo_path.size(); ++k) {
        const NodeIndex& n = result.search.node_path[k];
        nlohmann::json w = point(result.search.geo_path[k]);
        w["node"] = {n.i, n.j, n.h};
        waypoints.push_back(std::move(w));
    }
    j["waypoints"] = std::move(waypoints);
    j["segment_fuel_kg"] = result.search.segment_fuel_kg;
    j["total_fuel_kg"] = result.search.total_fuel_kg;
    j["search_cost_kg"] = result.search.search_cost_kg;
    j["flight_time_s"] = result.search.total_time_s;
    j["expanded_nodes"] = result.search.expanded_nodes;
    j["generated_nodes"] = result.search.generated_nodes;

    if (result.coarse) {
        nlohmann::json coarse = nlohmann::json::array();
        for (const GeoPoint& p : result.coarse->waypoints) coarse.push_back(point(p));
        j["coarse_route"] = std::move(coarse);
    }
    if (result.corridor) {
        nlohmann::json windows = nlohmann::json::array();
        for (const auto& w : result.corridor->windows) windows.push_back({w.j_min, w.j_max});
        j["corridor"] = {{"width", result.corridor->width}, {"windows", std::move(windows)}};
    }
    if (with_timings) {
        j["timings"] = {{"guide_s", result.guide_time_s},
                        {"corridor_s", result.corridor_time_s},
                        {"search_s", result.search_time_s},
                        {"total_s", result.total_time_s()}};
    }
    return j;
}

double pct_diff(double hybrid_time_s, double solver_time_s) {
    if (!(solver_time_s > 0.0)) return 0.0;
    return (hybrid_time_s - solver_time_s) / solver_time_s * 100.0;
}

std::vector<BenchRow> bench_fwd(std::span<const RoutePair> routes, std::span<const int> fwd_list,
                                const BenchOptions& opts, const AircraftSpec& spec, const WeatherField& field) {
    if (routes.empty()) throw InvalidArgument("benchmark needs at least one route");
    std::vector<BenchRow> rows;
    for (int fwd : fwd_list) {
        std::vector<RunOutcome> runs;
        int failures = 0;
        std::string error;
        for (const RoutePair& route : routes) {
            for (int rep = 0; rep < opts.repetitions; ++rep) {
                try {
                    runs.push_back(run_pair(route, {fwd, opts.dims.columns, opts.dims.levels}, opts.width, opts, spec,
                                            field));
                } catch (const Error& e) {
                    ++failures;
                    error = route.name + ": " + e.what();
                }
            }
        }
        rows.push_back(summarize(fwd, runs, failures, error));
    }
    return rows;
}

WidthSweep bench_width(std::span<const RoutePair> routes, std::span<const int> width_list, const BenchOptions& opts,
                       const AircraftSpec& spec, const WeatherField& field) {
    if (routes.empty()) throw InvalidArgument("benchmark needs at least one route");
    WidthSweep sweep;
    for (int w : width_list) {
        std::vector<RunOutcome> runs;
        int failures = 0;
        std::string error;
        for (const RoutePair& route : routes) {
            Stats fuel, time, expanded;
            for (int rep = 0; rep < opts.repetitions; ++rep) {
                try {
                    const RunOutcome r = run_pair(route, opts.dims, w, opts, spec, field);
                    runs.push_back(r);
                    fuel.add(r.fuel_hybrid_kg);
                    time.add(r.hybrid_time_s);
                    expanded.add(r.expanded_hybrid);
                } catch (const Error& e) {
                    ++failures;
                    error = route.name + ": " + e.what();
                }
            }
            if (fuel.n > 0) sweep.per_route.push_back({w, route.name, fuel.mean(), time.mean(), expanded.mean()});
        }
        sweep.rows.push_back(summarize(w, runs, failures, error));
    }
    return sweep;
}

std::string bench_csv_header() {
    return "param,solver_time_s,solver_time_sd,hybrid_time_s,hybrid_time_sd,guide_time_s,corridor_time_s,"
           "search_time_s,fuel_solver_kg,fuel_hybrid_kg,expanded_solver,expanded_hybrid,pct_diff,runs,failures,error";
}

std::string bench_route_csv_header() { return "width,route,fuel_kg,time_s,expanded"; }

void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows) {
    std::string text = bench_csv_header() + "\n";
    for (const BenchRow& r : rows) {
        text += std::to_string(r.param) + "," + num(r.solver_time_s) + "," + num(r.solver_time_sd) + "," +
                num(r.hybrid_time_s) + "," + num(r.hybrid_time_sd) + "," + num(r.guide_time_s) + "," +
                num(r.corridor_time_s) + "," + num(r.search_time_s) + "," + num(r.fuel_solver_kg) + "," +
                num(r.fuel_hybrid_kg) + "," + num(r.expanded_solver) + "," + num(r.expanded_hybrid) + "," +
                num(r.pct_diff) + "," + std::to_string(r.runs) + "," + std::to_string(r.failures) + "," +
                csv_escape(r.error) + "\n";
    }
    write_text(path, text);
}

std::vector<BenchRow> read_bench_csv(const std::filesystem::path& path) {
    const std::string src = path.string();
    std::vector<BenchRow> rows;
    std::size_t line = 1;
    for (const auto& c : read_csv_rows(path, bench_csv_header())) {
        ++line;
        BenchRow r;
        r.param = static_cast<int>(parse_double(c[0], src, line));
        r.solver_time_s = parse_double(c[1], src, line);
        r.solver_time_sd = parse_double(c[2], src, line);
        r.hybrid_time_s = parse_double(c[3], src, line);
        r.hybrid_time_sd = parse_double(c[4], src, line);
        r.guide_time_s = parse_double(c[5], src, line);
        r.corridor_time_s = parse_double(c[6], src, line);
        r.search_time_s = parse_double(c[7], src, line);
        r.fuel_solver_kg = parse_double(c[8], src, line);
        r.fuel_hybrid_kg = parse_double(c[9], src, line);
        r.expanded_solver = parse_double(c[10], src, line);
        r.expanded_hybrid = parse_double(c[11], src, line);
        r.pct_diff = parse_double(c[12], src, line);
        r.runs = static_cast<int>(parse_double(c[13], src, line));
        r.failures = static_cast<int>(parse_double(c[14], src, line));
        r.error = c[15];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_bench_route_csv(const std::filesystem::path& path, std::span<const BenchRouteRow> rows) {
    std::string text = bench_route_csv_header() + "\n";
    for (const BenchRouteRow& r : rows) {
        text += std::to_string(r.width) + "," + csv_escape(r.route) + "," + num(r.fuel_kg) + "," + num(r.time_s) + "," +
                num(r.expanded) + "\n";
    }
    write_text(path, text);
}

std::vector<BenchRouteRow> read_bench_route_csv(const std::filesystem::path& path) {
    const std::string src = path.string();
    std::vector<BenchRouteRow> rows;
    std::size_t line = 1;
    for (const auto& c : read_csv_rows(path, bench_route_csv_header())) {
        ++line;
        rows.push_back({static_cast<int>(parse_double(c[0], src, line)), c[1], parse_double(c[2], src, line),
                        parse_double(c[3], src, line), parse_double(c[4], src, line)});
    }
    return rows;
}

}  // namespace hfp
