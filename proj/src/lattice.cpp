#include "hfp/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "hfp/errors.hpp"

namespace hfp {

Lattice build_lattice(const GeoPoint& origin, const GeoPoint& destination, const LatticeDims& dims,
                      double lateral_halfwidth_m, const AltitudeBand& band) {
    if (dims.rows < 2) throw InvalidArgument("lattice needs at least 2 rows");
    if (dims.columns < 1 || dims.columns % 2 == 0) throw InvalidArgument("lattice columns must be odd and >= 1");
    if (dims.levels < 1) throw InvalidArgument("lattice needs at least 1 level");
    if (!(lateral_halfwidth_m >= 0.0)) throw InvalidArgument("lateral half-width must be >= 0");
    if (!(band.low_m >= 0.0 && band.high_m >= band.low_m)) throw InvalidArgument("altitude band invalid");
    if (origin.same_position(destination)) throw DegenerateTrip("origin and destination coincide");

    Lattice lat;
    lat.dims_ = dims;
    lat.origin_ = origin;
    lat.destination_ = destination;
    lat.lateral_halfwidth_m_ = lateral_halfwidth_m;
    lat.trip_length_m_ = great_circle_distance(origin, destination);
    lat.nodes_.resize(static_cast<std::size_t>(dims.rows) * dims.columns * dims.levels);

    const int center = (dims.columns - 1) / 2;
    const double spacing = center > 0 ? lateral_halfwidth_m / center : 0.0;
    std::vector<double> altitudes(static_cast<std::size_t>(dims.levels));
    for (int h = 0; h < dims.levels; ++h) {
        altitudes[h] = dims.levels == 1 ? 0.5 * (band.low_m + band.high_m)
                                        : band.low_m + (band.high_m - band.low_m) * h / (dims.levels - 1);
    }

    for (int i = 0; i < dims.rows; ++i) {
        const bool first = i == 0;
        const bool last = i == dims.rows - 1;
        GeoPoint track{};
        double lateral_bearing = 0.0;
        if (!first && !last) {
            track = intermediate_point(origin, destination, static_cast<double>(i) / (dims.rows - 1));
            lateral_bearing = initial_bearing(track, destination) + std::numbers::pi / 2.0;
        }
        for (int j = 0; j < dims.columns; ++j) {
            GeoPoint p;
            if (first) {
                p = origin;
            } else if (last) {
                p = destination;
            } else {
                const double offset = (j - center) * spacing;
                p = destination_point(track, lateral_bearing, offset);
            }
            for (int h = 0; h < dims.levels; ++h) {
                GeoPoint q = p;
                if (!first && !last) q.alt_m = altitudes[h];
                lat.nodes_[lat.flat({i, j, h})] = q;
            }
        }
    }
    return lat;
}

Lattice build_lattice(const GeoPoint& origin, const GeoPoint& destination, const LatticeDims& dims,
                      const AltitudeBand& band) {
    return build_lattice(origin, destination, dims, kDefaultLateralFraction * great_circle_distance(origin, destination),
                         band);
}

std::vector<NodeIndex> successors(const Lattice& lattice, const NodeIndex& node) {
    if (!lattice.valid(node)) throw InvalidArgument("node index outside lattice");
    if (node.i == lattice.rows() - 1) throw NoSuccessors("node is on the destination row");
    if (node.i + 1 == lattice.rows() - 1) return {{node.i + 1, node.j, node.h}};

    std::vector<NodeIndex> out;
    out.reserve(9);
    for (int dj = -1; dj <= 1; ++dj) {
        const int j = node.j + dj;
        if (j < 0 || j >= lattice.columns()) continue;
        for (int dh = -1; dh <= 1; ++dh) {
            const int h = node.h + dh;
            if (h < 0 || h >= lattice.levels()) continue;
            out.push_back({node.i + 1, j, h});
        }
    }
    return out;
}

void CoarseRoute::validate() const {
    if (waypoints.size() < 2) throw InvalidArgument("coarse route needs at least 2 waypoints");
    if (waypoints.front().same_position(waypoints.back()))
        throw DegenerateTrip("coarse route starts and ends at the same point");
}

bool Corridor::is_reachable(const NodeIndex& n) const {
    const int rows = static_cast<int>(windows.size());
    if (n.i <= 0 || n.i >= rows - 1) return true;
    const Window& w = windows[static_cast<std::size_t>(n.i)];
    return n.j >= w.j_min && n.j <= w.j_max;
}

GeoPoint corridor_guide_point(const CoarseRoute& coarse, int row, int rows) {
    const int m = static_cast<int>(coarse.waypoints.size()) - 1;
    const long long scaled = static_cast<long long>(row) * m;
    int p = static_cast<int>(scaled / rows);
    double fraction = static_cast<double>(scaled % rows) / rows;
    if (p >= m) {
        p = m - 1;
        fraction = 1.0;
    }
    return intermediate_point(coarse.waypoints[p], coarse.waypoints[p + 1], fraction);
}

Corridor build_corridor(const Lattice& lattice, const CoarseRoute& coarse, int width) {
    const int J = lattice.columns();
    if (width < 1 || width > J)
        throw WidthOutOfRange("width " + std::to_string(width) + " outside [1, " + std::to_string(J) + "]");
    coarse.validate();

    const int center = lattice.center_column();
    const int rows = lattice.rows();
    Corridor corridor;
    corridor.width = width;
    corridor.windows.resize(static_cast<std::size_t>(rows));
    corridor.guide_columns.resize(static_cast<std::size_t>(rows));

    for (int i = 0; i < rows; ++i) {
        const GeoPoint guide = corridor_guide_point(coarse, i, rows);
        int best = center;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < J; ++j) {
            const double d = great_circle_distance(lattice.node({i, j, 0}), guide);
            // Ties go to the column nearest the centerline, then the lower index.
            const bool closer = d < best_d;
            const bool tie_nearer_center = d == best_d && std::abs(j - center) < std::abs(best - center);
            if (closer || tie_nearer_center) {
                best = j;
                best_d = d;
            }
        }
        int j_min = best - (width - 1) / 2;
        j_min = std::clamp(j_min, 0, J - width);
        corridor.guide_columns[static_cast<std::size_t>(i)] = best;
        corridor.windows[static_cast<std::size_t>(i)] = {j_min, j_min + width - 1};
    }
    corridor.start_node = {0, corridor.windows.front().j_min + (width - 1) / 2, lattice.levels() / 2};
    return corridor;
}

Corridor full_corridor(const Lattice& lattice) {
    Corridor corridor;
    corridor.width = lattice.columns();
    corridor.windows.assign(static_cast<std::size_t>(lattice.rows()), {0, lattice.columns() - 1});
    corridor.guide_columns.assign(static_cast<std::size_t>(lattice.rows()), lattice.center_column());
    corridor.start_node = lattice.default_start();
    return corridor;
}

}  // namespace hfp
