#include "hfp/perfmodel.hpp"

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hfp/errors.hpp"

namespace hfp {

void AircraftSpec::validate() const {
    if (!(empty_mass_kg > 0.0 && empty_mass_kg < ref_mass_kg && ref_mass_kg <= max_mass_kg))
        throw ConfigError("aircraft masses must satisfy 0 < empty < ref <= max");
    if (!(tas_ms >= 150.0 && tas_ms <= 300.0)) throw ConfigError("tas_ms must be in [150, 300]");
    if (!(base_fuel_flow_kgps > 0.0)) throw ConfigError("base_fuel_flow_kgps must be positive");
    if (!std::isfinite(mass_exponent) || mass_exponent < 0.0) throw ConfigError("mass_exponent must be >= 0");
    if (!std::isfinite(temp_sensitivity) || temp_sensitivity < 0.0)
        throw ConfigError("temp_sensitivity must be >= 0");
}

double AircraftSpec::fuel_flow(double mass_kg, double temperature_k) const {
    return base_fuel_flow_kgps * std::pow(mass_kg / ref_mass_kg, mass_exponent) *
           (1.0 + temp_sensitivity * (temperature_k - kIsaSeaLevelK));
}

SegmentResult fly_segment(const AircraftSpec& spec, const AircraftState& state, const GeoPoint& to,
                          const WeatherField& field, int substeps) {
    if (substeps < 1) throw InvalidArgument("substeps must be >= 1");
    if (state.mass_kg < spec.empty_mass_kg || state.mass_kg > spec.max_mass_kg)
        throw InvalidArgument("aircraft mass outside [empty, max]");

    SegmentResult result;
    result.end_state = {to, state.mass_kg};
    const GeoPoint& from = state.position;
    const double distance = great_circle_distance(from, to);
    if (distance == 0.0) {
        result.end_state.position = to;
        return result;
    }

    const double piece = distance / substeps;
    double mass = state.mass_kg;
    for (int k = 0; k < substeps; ++k) {
        const GeoPoint a = intermediate_point(from, to, static_cast<double>(k) / substeps);
        const GeoPoint b = intermediate_point(from, to, static_cast<double>(k + 1) / substeps);
        const GeoPoint mid = intermediate_point(from, to, (k + 0.5) / substeps);
        const double track = initial_bearing(a, b);
        const WeatherSample w = field.sample(mid);
        const double along = w.wind_east_ms * std::sin(track) + w.wind_north_ms * std::cos(track);
        double ground_speed = spec.tas_ms + along;
        if (ground_speed < kMinGroundSpeedMs) {
            ground_speed = kMinGroundSpeedMs;
            result.groundspeed_floored = true;
        }
        const double dt = piece / ground_speed;
        const double fuel = spec.fuel_flow(mass, w.temperature_k) * dt;
        if (mass - fuel < spec.empty_mass_kg)
            throw Infeasible("segment would burn below empty mass (" + std::to_string(mass - fuel) + " kg)");
        mass -= fuel;
        result.time_s += dt;
    }
    // Difference of masses within a factor of two is exact, so
    // start mass - fuel_kg reproduces the end mass bit for bit.
    result.fuel_kg = state.mass_kg - mass;
    result.end_state.mass_kg = mass;
    return result;
}

RouteCost route_cost(const AircraftSpec& spec, const AircraftState& initial, std::span<const GeoPoint> route,
                     const WeatherField& field, int substeps) {
    if (route.size() < 2) throw InvalidArgument("route needs at least two points");
    RouteCost cost;
    AircraftState state{route.front(), initial.mass_kg};
    cost.segment_fuel_kg.reserve(route.size() - 1);
    for (std::size_t k = 0; k + 1 < route.size(); ++k) {
        state.position = route[k];
        const SegmentResult seg = fly_segment(spec, state, route[k + 1], field, substeps);
        cost.total_time_s += seg.time_s;
        cost.segment_fuel_kg.push_back(seg.fuel_kg);
        state = seg.end_state;
    }
    cost.final_state = state;
    cost.total_fuel_kg = initial.mass_kg - state.mass_kg;
    return cost;
}

namespace {

double required(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("aircraft spec missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("aircraft spec field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

AircraftSpec load_aircraft_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open aircraft spec " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    AircraftSpec spec;
    spec.ref_mass_kg = required(j, "ref_mass_kg");
    spec.empty_mass_kg = required(j, "empty_mass_kg");
    spec.max_mass_kg = required(j, "max_mass_kg");
    spec.tas_ms = required(j, "tas_ms");
    spec.base_fuel_flow_kgps = required(j, "base_fuel_flow_kgps");
    spec.mass_exponent = required(j, "mass_exponent");
    spec.temp_sensitivity = required(j, "temp_sensitivity");
    spec.validate();
    return spec;
}

void save_aircraft_spec(const AircraftSpec& spec, const std::filesystem::path& path) {
    nlohmann::json j{{"ref_mass_kg", spec.ref_mass_kg},
                     {"empty_mass_kg", spec.empty_mass_kg},
                     {"max_mass_kg", spec.max_mass_kg},
                     {"tas_ms", spec.tas_ms},
                     {"base_fuel_flow_kgps", spec.base_fuel_flow_kgps},
                     {"mass_exponent", spec.mass_exponent},
                     {"temp_sensitivity", spec.temp_sensitivity}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write aircraft spec " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace hfp
