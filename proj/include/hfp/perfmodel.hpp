#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "hfp/geo.hpp"
#include "hfp/weather.hpp"

namespace hfp {

inline constexpr double kIsaSeaLevelK = 288.15;
/// Ground speed never drops below this, whatever the headwind.
inline constexpr double kMinGroundSpeedMs = 20.0;

/**
 * Surrogate cruise performance: fuel flow follows a mass power law with a
 * linear temperature correction, and wind only changes ground speed.
 *
 *   flow = base_fuel_flow * (mass / ref_mass)^mass_exponent * (1 + temp_sensitivity * (T - 288.15))
 */
struct AircraftSpec {
    double ref_mass_kg = 60'000.0;
    double empty_mass_kg = 40'000.0;
    double max_mass_kg = 77'000.0;
    double tas_ms = 230.0;
    double base_fuel_flow_kgps = 0.65;
    double mass_exponent = 1.0;
    double temp_sensitivity = 0.002;

    void validate() const;
    double fuel_flow(double mass_kg, double temperature_k) const;
};

struct AircraftState {
    GeoPoint position;
    double mass_kg = 0.0;
};

struct SegmentResult {
    double fuel_kg = 0.0;
    double time_s = 0.0;
    AircraftState end_state;
    /// Set when the ground-speed floor was hit on any piece.
    bool groundspeed_floored = false;
};

/// Flies the great-circle leg from `state.position` to `to` in `substeps`
/// equal pieces, sampling weather at each piece midpoint and updating mass
/// after each piece. Throws Infeasible when mass would drop below empty mass.
SegmentResult fly_segment(const AircraftSpec& spec, const AircraftState& state, const GeoPoint& to,
                          const WeatherField& field, int substeps = 4);

struct RouteCost {
    double total_fuel_kg = 0.0;
    AircraftState final_state;
    std::vector<double> segment_fuel_kg;
    double total_time_s = 0.0;
};

/// Sum of fly_segment over consecutive waypoints with state threaded through.
RouteCost route_cost(const AircraftSpec& spec, const AircraftState& initial, std::span<const GeoPoint> route,
                     const WeatherField& field, int substeps = 4);

AircraftSpec load_aircraft_spec(const std::filesystem::path& path);
void save_aircraft_spec(const AircraftSpec& spec, const std::filesystem::path& path);

}  // namespace hfp
