#pragma once

#include <cstddef>
#include <vector>

#include "hfp/geo.hpp"

namespace hfp {

/// (row, column, level) address of a lattice node. Rows run from origin to
/// destination, columns laterally (increasing to the right of the track),
/// levels upwards in altitude.
struct NodeIndex {
    int i = 0;
    int j = 0;
    int h = 0;

    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

struct LatticeDims {
    int rows = 41;     // I, forward points
    int columns = 11;  // J, odd
    int levels = 3;    // H
};

struct AltitudeBand {
    double low_m = 10'058.4;   // FL330
    double high_m = 11'277.6;  // FL370
};

/// The {I, J, H} search lattice. Rows 0 and I-1 collapse onto the origin and
/// destination; interior row i is centered on the great-circle point at
/// fraction i/(I-1), with columns spread perpendicular to the local track.
class Lattice {
public:
    const LatticeDims& dims() const { return dims_; }
    int rows() const { return dims_.rows; }
    int columns() const { return dims_.columns; }
    int levels() const { return dims_.levels; }
    int center_column() const { return (dims_.columns - 1) / 2; }
    std::size_t size() const { return nodes_.size(); }

    const GeoPoint& origin() const { return origin_; }
    const GeoPoint& destination() const { return destination_; }
    double lateral_halfwidth_m() const { return lateral_halfwidth_m_; }
    double trip_length_m() const { return trip_length_m_; }

    std::size_t flat(const NodeIndex& n) const {
        return (static_cast<std::size_t>(n.i) * dims_.columns + n.j) * dims_.levels + n.h;
    }
    NodeIndex unflat(std::size_t k) const {
        const int h = static_cast<int>(k % dims_.levels);
        k /= dims_.levels;
        return {static_cast<int>(k / dims_.columns), static_cast<int>(k % dims_.columns), h};
    }
    bool valid(const NodeIndex& n) const {
        return n.i >= 0 && n.i < dims_.rows && n.j >= 0 && n.j < dims_.columns && n.h >= 0 && n.h < dims_.levels;
    }
    const GeoPoint& node(const NodeIndex& n) const { return nodes_[flat(n)]; }

    /// Start of every search: row 0, center column, middle level.
    NodeIndex default_start() const { return {0, center_column(), dims_.levels / 2}; }

    friend Lattice build_lattice(const GeoPoint&, const GeoPoint&, const LatticeDims&, double, const AltitudeBand&);

private:
    LatticeDims dims_;
    GeoPoint origin_, destination_;
    double lateral_halfwidth_m_ = 0.0;
    double trip_length_m_ = 0.0;
    std::vector<GeoPoint> nodes_;
};

/// Fraction of the trip length used for the lateral half-width by default.
inline constexpr double kDefaultLateralFraction = 0.15;

/// Throws DegenerateTrip for coincident endpoints and InvalidArgument for
/// bad dimensions (I >= 2, odd J >= 1, H >= 1).
Lattice build_lattice(const GeoPoint& origin, const GeoPoint& destination, const LatticeDims& dims,
                      double lateral_halfwidth_m, const AltitudeBand& band = {});

/// Same, with the default half-width of 15% of the trip length.
Lattice build_lattice(const GeoPoint& origin, const GeoPoint& destination, const LatticeDims& dims,
                      const AltitudeBand& band = {});

/// Adjacency rule: (i+1, j', h') with |j'-j| <= 1, |h'-h| <= 1, clipped to
/// the lattice. The destination row collapses to the single logical node
/// (I-1, j, h). Throws NoSuccessors on the last row.
std::vector<NodeIndex> successors(const Lattice& lattice, const NodeIndex& node);

/// Coarse guide trajectory: first point origin, last destination.
struct CoarseRoute {
    std::vector<GeoPoint> waypoints;

    /// n >= 2 with distinct endpoints. Repeated interior waypoints are legal:
    /// an untrained policy may stand still.
    void validate() const;
};

/// Per-row window of reachable columns built around a coarse route.
struct Corridor {
    struct Window {
        int j_min = 0;
        int j_max = 0;
    };
    std::vector<Window> windows;
    /// Nearest lattice column to the guide point of each row.
    std::vector<int> guide_columns;
    int width = 0;
    NodeIndex start_node;

    /// Rows 0 and I-1 are always reachable.
    bool is_reachable(const NodeIndex& n) const;
};

/// Guide point for row i: piecewise great-circle interpolation along the
/// coarse route with m = n-1 segments, segment p = floor(i*m/I) (clamped to
/// m-1) at fraction (i*m mod I)/I.
GeoPoint corridor_guide_point(const CoarseRoute& coarse, int row, int rows);

/// Throws WidthOutOfRange unless 1 <= width <= J.
Corridor build_corridor(const Lattice& lattice, const CoarseRoute& coarse, int width);

/// Corridor that admits every node, with the default start node.
Corridor full_corridor(const Lattice& lattice);

inline bool is_reachable(const Corridor& corridor, const NodeIndex& n) { return corridor.is_reachable(n); }

}  // namespace hfp
