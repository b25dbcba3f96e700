// hfp: plan routes, train guide policies and run the sensitivity benchmarks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hfp/errors.hpp"
#include "hfp/harness.hpp"
#include "hfp/trainer.hpp"

namespace fs = std::filesystem;
using namespace hfp;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string weather = "jet";
    std::string aircraft;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Seed for weather generation and training");
    cmd->add_option("--weather", c.weather, "uniform | jet | csv:<path>");
    cmd->add_option("--aircraft", c.aircraft, "Aircraft spec JSON (built-in defaults otherwise)");
    cmd->add_option("--out-dir", c.out_dir, "Directory for all outputs");
}

AircraftSpec aircraft(const Common& c) {
    return c.aircraft.empty() ? AircraftSpec{} : load_aircraft_spec(c.aircraft);
}

fs::path out_dir(const Common& c) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
    return c.out_dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::optional<PolicyParams> load_policy(GuideMode mode, const std::string& checkpoint) {
    if (mode != GuideMode::Policy) return std::nullopt;
    if (checkpoint.empty()) throw InvalidArgument("--guide policy needs --checkpoint");
    return load_checkpoint(checkpoint).params;
}

std::vector<int> range_list(int lo, int hi, int step) {
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

void print_rows(const std::vector<BenchRow>& rows, const char* label) {
    std::printf("%6s %10s %10s %8s %10s %10s %8s\n", label, "solver_s", "hybrid_s", "diff%", "exp_solver", "exp_hybrid",
                "fail");
    for (const BenchRow& r : rows) {
        std::printf("%6d %10.4f %10.4f %8.2f %10.1f %10.1f %8d\n", r.param, r.solver_time_s, r.hybrid_time_s,
                    r.pct_diff, r.expanded_solver, r.expanded_hybrid, r.failures);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid flight planner: guided corridor A* over a 3-D lattice"};
    app.require_subcommand(1);

    // plan
    Common plan_c;
    std::string from, to, guide = "great_circle", checkpoint;
    PlanRequest req;
    bool no_timings = false;
    auto* plan_cmd = app.add_subcommand("plan", "Plan one route and write route.json");
    add_common(plan_cmd, plan_c);
    plan_cmd->add_option("--from", from, "Origin: airport code or lat,lon")->required();
    plan_cmd->add_option("--to", to, "Destination: airport code or lat,lon")->required();
    plan_cmd->add_option("--rows", req.dims.rows, "Forward points I");
    plan_cmd->add_option("--columns", req.dims.columns, "Lateral columns J (odd)");
    plan_cmd->add_option("--levels", req.dims.levels, "Altitude levels H");
    plan_cmd->add_option("--width", req.width, "Corridor width w");
    plan_cmd->add_option("--guide", guide, "policy | great_circle | none");
    plan_cmd->add_option("--checkpoint", checkpoint, "Policy checkpoint for --guide policy");
    plan_cmd->add_option("--waypoints", req.waypoints, "Coarse route waypoints n");
    plan_cmd->add_option("--substeps", req.substeps, "Integration pieces per edge");
    plan_cmd->add_flag("--no-timings", no_timings, "Omit wall-clock timings from route.json");

    // train
    Common train_c;
    std::string config_path, resume_path;
    std::optional<long long> instances;
    bool seed_given = false;
    train_c.weather = "uniform";
    auto* train_cmd = app.add_subcommand("train", "Train a guide policy with PPO-clip");
    add_common(train_cmd, train_c);
    train_cmd->add_option("--config", config_path, "Training config JSON")->required();
    train_cmd->add_option("--resume", resume_path, "Continue from this checkpoint");
    train_cmd->add_option("--instances", instances, "Override the instance budget");

    // bench-fwd / bench-width
    Common bench_c;
    std::string routes_text, bench_guide = "great_circle", bench_checkpoint;
    int repetitions = 1, width = 5, fwd_lo = 11, fwd_hi = 51, fwd_step = 5;
    std::vector<int> widths;
    auto add_bench = [&](CLI::App* cmd) {
        add_common(cmd, bench_c);
        cmd->add_option("--routes", routes_text, "Comma-separated ORG-DST pairs (default set otherwise)");
        cmd->add_option("--repetitions", repetitions, "Repetitions per route");
        cmd->add_option("--guide", bench_guide, "policy | great_circle");
        cmd->add_option("--checkpoint", bench_checkpoint, "Policy checkpoint for --guide policy");
    };
    auto* fwd_cmd = app.add_subcommand("bench-fwd", "Sweep forward points at fixed width");
    add_bench(fwd_cmd);
    fwd_cmd->add_option("--width", width, "Corridor width w");
    fwd_cmd->add_option("--fwd-min", fwd_lo, "First FWD value");
    fwd_cmd->add_option("--fwd-max", fwd_hi, "Last FWD value");
    fwd_cmd->add_option("--fwd-step", fwd_step, "FWD increment");
    auto* width_cmd = app.add_subcommand("bench-width", "Sweep corridor width on a 41x11x3 lattice");
    add_bench(width_cmd);
    width_cmd->add_option("--widths", widths, "Widths to sweep, e.g. 1,3,5 (default 1..11)")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan_cmd) {
            req.origin = parse_location(from);
            req.destination = parse_location(to);
            req.guide = guide_mode_from_string(guide);
            req.seed = plan_c.seed;
            const AircraftSpec spec = aircraft(plan_c);
            const auto field = make_weather(plan_c.weather, plan_c.seed);
            const auto policy = load_policy(req.guide, checkpoint);
            const PlanResult result = plan(req, spec, *field, policy ? &*policy : nullptr);
            const fs::path dir = out_dir(plan_c);
            write_file(dir / "route.json", route_json(req, result, !no_timings).dump(2) + "\n");
            std::printf("fuel %.3f kg  expanded %zu  guide %.4f s  corridor %.4f s  search %.4f s\n",
                        result.search.total_fuel_kg, result.search.expanded_nodes, result.guide_time_s,
                        result.corridor_time_s, result.search_time_s);
            std::printf("wrote %s\n", (dir / "route.json").string().c_str());
        } else if (*train_cmd) {
            seed_given = train_cmd->count("--seed") > 0;
            TrainConfig cfg = load_train_config(config_path);
            if (seed_given) cfg.seed = train_c.seed;
            if (instances) cfg.instances = *instances;
            cfg.validate();
            const AircraftSpec spec = aircraft(train_c);
            FieldGenerator fields;
            if (train_c.weather == "uniform") {
                fields = uniform_field_generator();
            } else {
                // Rollouts may wander far outside Europe, so a generated jet covers the globe.
                std::shared_ptr<const WeatherField> field;
                if (train_c.weather == "jet") {
                    JetStreamParams p;
                    p.seed = cfg.seed;
                    p.resolution_deg = 1.0;
                    field = std::make_shared<const WeatherField>(make_jet_stream(kGlobalBox, p));
                } else {
                    field = make_weather(train_c.weather, cfg.seed);
                }
                fields = [field](long long) { return field; };
            }

            std::optional<TrainingState> resume;
            if (!resume_path.empty()) resume = training_state_from_checkpoint(load_checkpoint(resume_path));

            const fs::path dir = out_dir(train_c);
            const fs::path ckpt = dir / "checkpoint.json";
            const fs::path log_path = dir / "train_log.csv";
            const bool append = resume && fs::exists(log_path);
            std::ofstream log(log_path, append ? std::ios::app : std::ios::trunc);
            if (!log) throw IoError("cannot write " + log_path.string());
            if (!append) log << format_log_header() << '\n';

            TrainHooks hooks;
            hooks.progress = [](const std::string& line) { std::cout << line << std::endl; };
            hooks.log_row = [&](const TrainLogRow& row) {
                log << format_log_row(row) << std::endl;
                if (!log) throw IoError("write failed for " + log_path.string());
            };
            hooks.checkpoint = [&](const TrainingState& s) { save_checkpoint(ckpt, s.params, {}, training_state_json(s)); };
            const TrainResult result = train(cfg, spec, fields, hooks, resume ? &*resume : nullptr);
            save_checkpoint(ckpt, result.state.params, {}, training_state_json(result.state));
            std::printf("wrote %s and %s\n", ckpt.string().c_str(), log_path.string().c_str());
        } else {
            const bool is_fwd = static_cast<bool>(*fwd_cmd);
            const AircraftSpec spec = aircraft(bench_c);
            const auto field = make_weather(bench_c.weather, bench_c.seed);
            const auto routes = routes_text.empty() ? default_route_set() : parse_route_set(routes_text);
            BenchOptions opts;
            opts.guide = guide_mode_from_string(bench_guide);
            if (opts.guide == GuideMode::None) throw InvalidArgument("benchmarks compare against a guide");
            const auto policy = load_policy(opts.guide, bench_checkpoint);
            opts.policy = policy ? &*policy : nullptr;
            opts.repetitions = repetitions;
            if (repetitions < 1) throw InvalidArgument("--repetitions must be >= 1");
            const fs::path dir = out_dir(bench_c);
            if (is_fwd) {
                opts.width = width;
                const auto fwd = range_list(fwd_lo, fwd_hi, fwd_step);
                const auto rows = bench_fwd(routes, fwd, opts, spec, *field);
                write_bench_csv(dir / "bench_fwd.csv", rows);
                print_rows(rows, "fwd");
            } else {
                if (widths.empty()) widths = range_list(1, opts.dims.columns, 1);
                const WidthSweep sweep = bench_width(routes, widths, opts, spec, *field);
                write_bench_csv(dir / "bench_width.csv", sweep.rows);
                if (routes.size() == 2) write_bench_route_csv(dir / "bench_width_routes.csv", sweep.per_route);
                print_rows(sweep.rows, "width");
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.category() == Error::Category::Io ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
