#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hfp/lattice.hpp"
#include "hfp/perfmodel.hpp"
#include "hfp/weather.hpp"

namespace hfp {

struct SearchResult {
    std::vector<NodeIndex> node_path;
    std::vector<GeoPoint> geo_path;
    /// Fuel of geo_path re-flown with mass threaded from the initial state.
    double total_fuel_kg = 0.0;
    /// Objective the search minimized: sum of edge costs under the nominal
    /// mass profile.
    double search_cost_kg = 0.0;
    double total_time_s = 0.0;
    std::vector<double> segment_fuel_kg;
    std::size_t expanded_nodes = 0;
    std::size_t generated_nodes = 0;
    double wall_time_s = 0.0;
};

/**
 * Edge-cost model shared by A* and the DP oracle.
 *
 * Mass is path dependent, so edges are costed with a per-row nominal mass:
 * the mass the aircraft would have at that row flying the lattice centerline
 * from the initial state. This keeps edge costs state independent.
 */
class EdgeCostModel {
public:
    EdgeCostModel(const Lattice& lattice, const AircraftSpec& spec, const AircraftState& initial,
                  const WeatherField& field, int substeps = 4);

    double edge_cost(const NodeIndex& from, const NodeIndex& to) const;

    /// Admissible remaining-fuel bound: distance to destination times the
    /// smallest fuel per meter any edge can achieve under this field.
    double heuristic(const NodeIndex& n) const;

    double min_specific_burn() const { return min_specific_burn_; }
    const std::vector<double>& nominal_mass() const { return nominal_mass_; }

    const Lattice& lattice() const { return *lattice_; }
    const AircraftSpec& spec() const { return *spec_; }
    const AircraftState& initial_state() const { return initial_; }
    const WeatherField& field() const { return *field_; }
    int substeps() const { return substeps_; }

private:
    const Lattice* lattice_;
    const AircraftSpec* spec_;
    AircraftState initial_;
    const WeatherField* field_;
    int substeps_;
    std::vector<double> nominal_mass_;
    double min_specific_burn_ = 0.0;
};

/// A* over the lattice restricted to corridor-reachable nodes (all nodes when
/// no corridor is given). Throws NoPath if the corridor disconnects the trip.
SearchResult astar(const Lattice& lattice, const Corridor* corridor, const AircraftSpec& spec,
                   const AircraftState& initial_state, const WeatherField& field, int substeps = 4);

/// Exhaustive layer-by-layer dynamic program over the same edge costs.
/// Limited to lattices of at most 50,000 nodes.
SearchResult dp_oracle(const Lattice& lattice, const Corridor* corridor, const AircraftSpec& spec,
                       const AircraftState& initial_state, const WeatherField& field, int substeps = 4);

/// Optimal remaining cost-to-go from every reachable node (infinity where the
/// destination cannot be reached), indexed by Lattice::flat.
std::vector<double> cost_to_go(const EdgeCostModel& costs, const Corridor* corridor);

}  // namespace hfp
