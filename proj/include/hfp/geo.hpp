#pragma once

#include <cmath>
#include <numbers>

namespace hfp {

inline constexpr double kEarthRadiusM = 6'371'000.0;
/// Upper bound on distances accepted by the local tangent-plane operations.
inline constexpr double kMaxLocalDistanceM = 6'000'000.0;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps a longitude into (-180, 180].
double normalize_lon(double lon_deg);

/// Position on the sphere plus altitude above it.
struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_m = 0.0;

    /// Validating constructor: normalizes longitude, rejects out-of-range
    /// latitude and negative or non-finite altitude.
    static GeoPoint make(double lat_deg, double lon_deg, double alt_m = 0.0);

    /// Same latitude/longitude, altitude ignored.
    bool same_position(const GeoPoint& other) const {
        return lat_deg == other.lat_deg && lon_deg == other.lon_deg;
    }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Displacement in a local east/north tangent plane, meters.
struct PlaneVector {
    double east_m = 0.0;
    double north_m = 0.0;

    double norm() const { return std::hypot(east_m, north_m); }
    double dot(const PlaneVector& o) const { return east_m * o.east_m + north_m * o.north_m; }

    friend PlaneVector operator+(PlaneVector a, PlaneVector b) { return {a.east_m + b.east_m, a.north_m + b.north_m}; }
    friend PlaneVector operator-(PlaneVector a, PlaneVector b) { return {a.east_m - b.east_m, a.north_m - b.north_m}; }
    friend PlaneVector operator*(double s, PlaneVector v) { return {s * v.east_m, s * v.north_m}; }
    friend bool operator==(const PlaneVector&, const PlaneVector&) = default;
};

/// Counter-clockwise plane rotation angle (east axis towards north axis).
struct RotationAngle {
    double radians = 0.0;

    static RotationAngle from_degrees(double deg) { return {deg2rad(deg)}; }
    double degrees() const { return rad2deg(radians); }
};

/// Haversine distance on the mean-radius sphere; altitude is ignored.
double great_circle_distance(const GeoPoint& a, const GeoPoint& b);

/// Initial true bearing from `a` towards `b`, radians clockwise from north.
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

/// Point at `fraction` of the great-circle arc from `a` to `b`. Altitude is
/// interpolated linearly.
GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction);

/// Point reached by following the great circle leaving `origin` on
/// `bearing_rad` for `distance_m`. Altitude is copied from `origin`.
GeoPoint destination_point(const GeoPoint& origin, double bearing_rad, double distance_m);

/// East/north coordinates of `target` in the azimuthal-equidistant plane
/// centered on `origin`: the vector's norm is the great-circle distance and
/// its direction the initial bearing. Throws DistanceOutOfRange past 6,000 km.
PlaneVector local_displacement(const GeoPoint& origin, const GeoPoint& target);

/// Inverse of local_displacement. The resulting altitude is
/// origin.alt_m + alt_delta_m, clamped at zero.
GeoPoint displace(const GeoPoint& origin, const PlaneVector& v, double alt_delta_m = 0.0);

/// Angle that maps the origin->destination displacement onto the positive
/// north axis. Throws DegenerateTrip when both points coincide.
RotationAngle trip_rotation(const GeoPoint& origin, const GeoPoint& destination);

PlaneVector rotate(const PlaneVector& v, RotationAngle phi);
PlaneVector rotate_inverse(const PlaneVector& v, RotationAngle phi);

}  // namespace hfp
