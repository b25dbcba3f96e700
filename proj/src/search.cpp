#include "hfp/search.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <string>

#include "hfp/errors.hpp"

namespace hfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kOracleNodeLimit = 50'000;
constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

bool reachable(const Corridor* corridor, const NodeIndex& n) {
    return corridor == nullptr || corridor->is_reachable(n);
}

NodeIndex start_node(const Lattice& lattice, const Corridor* corridor) {
    if (corridor != nullptr) {
        if (corridor->windows.size() != static_cast<std::size_t>(lattice.rows()))
            throw InvalidArgument("corridor was built for a different lattice");
        return corridor->start_node;
    }
    return lattice.default_start();
}

SearchResult finish(const EdgeCostModel& costs, const std::vector<std::size_t>& parent, std::size_t goal,
                    double search_cost) {
    const Lattice& lattice = costs.lattice();
    SearchResult result;
    for (std::size_t k = goal; k != kNoParent; k = parent[k]) result.node_path.push_back(lattice.unflat(k));
    std::reverse(result.node_path.begin(), result.node_path.end());
    result.geo_path.reserve(result.node_path.size());
    for (const NodeIndex& n : result.node_path) result.geo_path.push_back(lattice.node(n));

    const RouteCost rc = route_cost(costs.spec(), costs.initial_state(), result.geo_path, costs.field(), costs.substeps());
    result.total_fuel_kg = rc.total_fuel_kg;
    result.total_time_s = rc.total_time_s;
    result.segment_fuel_kg = rc.segment_fuel_kg;
    result.search_cost_kg = search_cost;
    return result;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

EdgeCostModel::EdgeCostModel(const Lattice& lattice, const AircraftSpec& spec, const AircraftState& initial,
                             const WeatherField& field, int substeps)
    : lattice_(&lattice), spec_(&spec), initial_(initial), field_(&field), substeps_(substeps) {
    spec.validate();
    nominal_mass_.resize(static_cast<std::size_t>(lattice.rows()));
    nominal_mass_[0] = initial.mass_kg;
    const int c = lattice.center_column();
    for (int i = 0; i + 1 < lattice.rows(); ++i) {
        const SegmentResult seg =
            fly_segment(spec, {lattice.node({i, c, 0}), nominal_mass_[i]}, lattice.node({i + 1, c, 0}), field, substeps);
        nominal_mass_[i + 1] = seg.end_state.mass_kg;
    }

    const double mass_factor = std::pow(spec.empty_mass_kg / spec.ref_mass_kg, spec.mass_exponent);
    const double temp_factor = std::max(0.0, 1.0 - spec.temp_sensitivity * field.max_isa_deviation());
    min_specific_burn_ = spec.base_fuel_flow_kgps * mass_factor * temp_factor / (spec.tas_ms + field.max_wind_speed());
}

double EdgeCostModel::edge_cost(const NodeIndex& from, const NodeIndex& to) const {
    const AircraftState state{lattice_->node(from), nominal_mass_[static_cast<std::size_t>(from.i)]};
    return fly_segment(*spec_, state, lattice_->node(to), *field_, substeps_).fuel_kg;
}

double EdgeCostModel::heuristic(const NodeIndex& n) const {
    return great_circle_distance(lattice_->node(n), lattice_->destination()) * min_specific_burn_;
}

SearchResult astar(const Lattice& lattice, const Corridor* corridor, const AircraftSpec& spec,
                   const AircraftState& initial_state, const WeatherField& field, int substeps) {
    const auto t0 = std::chrono::steady_clock::now();
    const EdgeCostModel costs(lattice, spec, initial_state, field, substeps);
    const NodeIndex start = start_node(lattice, corridor);

    struct Entry {
        double f;
        double g;
        int j;
        int h;
        std::size_t key;
    };
    // Lowest f first; ties prefer larger g (deeper), then smaller j, then smaller h.
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        if (a.j != b.j) return a.j > b.j;
        if (a.h != b.h) return a.h > b.h;
        return a.key > b.key;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

    const std::size_t n_nodes = lattice.size();
    std::vector<double> g(n_nodes, kInf);
    std::vector<std::size_t> parent(n_nodes, kNoParent);
    std::vector<char> closed(n_nodes, 0);

    const std::size_t start_key = lattice.flat(start);
    g[start_key] = 0.0;
    open.push({costs.heuristic(start), 0.0, start.j, start.h, start_key});
    std::size_t expanded = 0;
    std::size_t generated = 1;
    const int last_row = lattice.rows() - 1;

    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        if (closed[top.key]) continue;
        closed[top.key] = 1;
        ++expanded;
        const NodeIndex node = lattice.unflat(top.key);
        if (node.i == last_row) {
            SearchResult result = finish(costs, parent, top.key, top.g);
            result.expanded_nodes = expanded;
            result.generated_nodes = generated;
            result.wall_time_s = seconds_since(t0);
            return result;
        }
        for (const NodeIndex& next : successors(lattice, node)) {
            if (!reachable(corridor, next)) continue;
            const std::size_t key = lattice.flat(next);
            if (closed[key]) continue;
            const double ng = top.g + costs.edge_cost(node, next);
            if (ng < g[key]) {
                g[key] = ng;
                parent[key] = top.key;
                open.push({ng + costs.heuristic(next), ng, next.j, next.h, key});
                ++generated;
            }
        }
    }
    throw NoPath("corridor disconnects origin from destination");
}

SearchResult dp_oracle(const Lattice& lattice, const Corridor* corridor, const AircraftSpec& spec,
                       const AircraftState& initial_state, const WeatherField& field, int substeps) {
    if (lattice.size() > kOracleNodeLimit)
        throw InvalidArgument("dp_oracle limited to 50,000 nodes, lattice has " + std::to_string(lattice.size()));
    const auto t0 = std::chrono::steady_clock::now();
    const EdgeCostModel costs(lattice, spec, initial_state, field, substeps);
    const NodeIndex start = start_node(lattice, corridor);

    const std::size_t n_nodes = lattice.size();
    std::vector<double> cost(n_nodes, kInf);
    std::vector<std::size_t> parent(n_nodes, kNoParent);
    cost[lattice.flat(start)] = 0.0;
    std::size_t expanded = 0;
    std::size_t generated = 1;

    for (int i = 0; i + 1 < lattice.rows(); ++i) {
        for (int j = 0; j < lattice.columns(); ++j) {
            for (int h = 0; h < lattice.levels(); ++h) {
                const NodeIndex node{i, j, h};
                const std::size_t key = lattice.flat(node);
                if (cost[key] == kInf) continue;
                ++expanded;
                for (const NodeIndex& next : successors(lattice, node)) {
                    if (!reachable(corridor, next)) continue;
                    const std::size_t nk = lattice.flat(next);
                    const double c = cost[key] + costs.edge_cost(node, next);
                    ++generated;
                    if (c < cost[nk]) {
                        cost[nk] = c;
                        parent[nk] = key;
                    }
                }
            }
        }
    }

    const int last = lattice.rows() - 1;
    std::size_t goal = kNoParent;
    for (int j = 0; j < lattice.columns(); ++j) {
        for (int h = 0; h < lattice.levels(); ++h) {
            const std::size_t key = lattice.flat({last, j, h});
            if (cost[key] < kInf && (goal == kNoParent || cost[key] < cost[goal])) goal = key;
        }
    }
    if (goal == kNoParent) throw NoPath("corridor disconnects origin from destination");
    ++expanded;
    SearchResult result = finish(costs, parent, goal, cost[goal]);
    result.expanded_nodes = expanded;
    result.generated_nodes = generated;
    result.wall_time_s = seconds_since(t0);
    return result;
}

std::vector<double> cost_to_go(const EdgeCostModel& costs, const Corridor* corridor) {
    const Lattice& lattice = costs.lattice();
    std::vector<double> ctg(lattice.size(), kInf);
    const int last = lattice.rows() - 1;
    for (int j = 0; j < lattice.columns(); ++j)
        for (int h = 0; h < lattice.levels(); ++h) ctg[lattice.flat({last, j, h})] = 0.0;

    for (int i = last - 1; i >= 0; --i) {
        for (int j = 0; j < lattice.columns(); ++j) {
            for (int h = 0; h < lattice.levels(); ++h) {
                const NodeIndex node{i, j, h};
                if (!reachable(corridor, node)) continue;
                double best = kInf;
                for (const NodeIndex& next : successors(lattice, node)) {
                    if (!reachable(corridor, next)) continue;
                    const double rest = ctg[lattice.flat(next)];
                    if (rest == kInf) continue;
                    best = std::min(best, costs.edge_cost(node, next) + rest);
                }
                ctg[lattice.flat(node)] = best;
            }
        }
    }
    return ctg;
}

}  // namespace hfp
