#include <memory>
#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hfp/errors.hpp"
#include "hfp/harness.hpp"
#include "hfp/trainer.hpp"

namespace py = pybind11;
using namespace hfp;

namespace {

std::string plan_json(const std::string& origin, const std::string& destination, int rows, int columns, int levels,
                      int width, const std::string& guide, const std::string& weather, std::uint64_t seed,
                      const std::string& checkpoint, bool timings) {
    PlanRequest req;
    req.origin = parse_location(origin);
    req.destination = parse_location(destination);
    req.dims = {rows, columns, levels};
    req.width = width;
    req.guide = guide_mode_from_string(guide);
    req.seed = seed;
    std::optional<PolicyParams> policy;
    if (req.guide == GuideMode::Policy) {
        if (checkpoint.empty()) throw InvalidArgument("policy guide needs a checkpoint");
        policy = load_checkpoint(checkpoint).params;
    }
    const auto field = make_weather(weather, seed);
    const PlanResult result = plan(req, AircraftSpec{}, *field, policy ? &*policy : nullptr);
    return route_json(req, result, timings).dump();
}

py::tuple train_summary(const std::string& config_path, long long instances, std::uint64_t seed,
                        const std::string& checkpoint_out) {
    TrainConfig cfg = load_train_config(config_path);
    if (instances > 0) cfg.instances = instances;
    cfg.seed = seed;
    cfg.validate();
    const TrainResult r = train(cfg, AircraftSpec{}, uniform_field_generator());
    if (!checkpoint_out.empty()) save_checkpoint(checkpoint_out, r.state.params, {}, training_state_json(r.state));
    py::list rewards;
    for (const TrainLogRow& row : r.log) rewards.append(row.mean_reward);
    return py::make_tuple(r.state.update_index, rewards);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid flight planner core";

    py::register_exception<Error>(m, "HfpError", PyExc_RuntimeError);

    m.def(
        "distance_m",
        [](double lat1, double lon1, double lat2, double lon2) {
            return great_circle_distance(GeoPoint::make(lat1, lon1), GeoPoint::make(lat2, lon2));
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));

    m.def("airport_codes", [] {
        std::vector<std::string> codes;
        for (const Airport& a : airports()) codes.emplace_back(a.code);
        return codes;
    });

    m.def("plan_json", &plan_json, py::arg("origin"), py::arg("destination"), py::arg("rows") = 41,
          py::arg("columns") = 11, py::arg("levels") = 3, py::arg("width") = 5, py::arg("guide") = "great_circle",
          py::arg("weather") = "jet", py::arg("seed") = 0, py::arg("checkpoint") = "", py::arg("timings") = true);

    m.def("train", &train_summary, py::arg("config"), py::arg("instances") = 0, py::arg("seed") = 0,
          py::arg("checkpoint_out") = "");

    m.def("step_reward", &step_reward, py::arg("progress"), py::arg("fuel_kg"), py::arg("gamma"));
    m.def("end_reward", &end_reward, py::arg("distance"), py::arg("threshold"), py::arg("rho1") = 5.0,
          py::arg("rho2") = 2.0);
    m.def("pct_diff", &pct_diff, py::arg("hybrid_time_s"), py::arg("solver_time_s"));
}
