#include "hfp/geo.hpp"

#include <algorithm>
#include <string>

#include "hfp/errors.hpp"

namespace hfp {

double normalize_lon(double lon_deg) {
    double lon = std::fmod(lon_deg, 360.0);
    if (lon <= -180.0) lon += 360.0;
    if (lon > 180.0) lon -= 360.0;
    return lon;
}

GeoPoint GeoPoint::make(double lat_deg, double lon_deg, double alt_m) {
    if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0)
        throw InvalidArgument("latitude out of [-90, 90]: " + std::to_string(lat_deg));
    if (!std::isfinite(lon_deg))
        throw InvalidArgument("non-finite longitude");
    if (!std::isfinite(alt_m) || alt_m < 0.0)
        throw InvalidArgument("altitude must be finite and >= 0: " + std::to_string(alt_m));
    return GeoPoint{lat_deg, normalize_lon(lon_deg), alt_m};
}

double great_circle_distance(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = deg2rad(a.lat_deg);
    const double lat2 = deg2rad(b.lat_deg);
    const double sdlat = std::sin(0.5 * (lat2 - lat1));
    const double sdlon = std::sin(0.5 * deg2rad(b.lon_deg - a.lon_deg));
    const double h = std::clamp(sdlat * sdlat + std::cos(lat1) * std::cos(lat2) * sdlon * sdlon, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = deg2rad(a.lat_deg);
    const double lat2 = deg2rad(b.lat_deg);
    const double dlon = deg2rad(b.lon_deg - a.lon_deg);
    return std::atan2(std::sin(dlon) * std::cos(lat2),
                      std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon));
}

GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction) {
    const double alt = a.alt_m + (b.alt_m - a.alt_m) * fraction;
    const double delta = great_circle_distance(a, b) / kEarthRadiusM;
    if (delta == 0.0) return GeoPoint{a.lat_deg, a.lon_deg, alt};
    if (fraction == 0.0) return GeoPoint{a.lat_deg, a.lon_deg, alt};
    if (fraction == 1.0) return GeoPoint{b.lat_deg, b.lon_deg, alt};

    const double lat1 = deg2rad(a.lat_deg), lon1 = deg2rad(a.lon_deg);
    const double lat2 = deg2rad(b.lat_deg), lon2 = deg2rad(b.lon_deg);
    const double sd = std::sin(delta);
    const double wa = std::sin((1.0 - fraction) * delta) / sd;
    const double wb = std::sin(fraction * delta) / sd;
    const double x = wa * std::cos(lat1) * std::cos(lon1) + wb * std::cos(lat2) * std::cos(lon2);
    const double y = wa * std::cos(lat1) * std::sin(lon1) + wb * std::cos(lat2) * std::sin(lon2);
    const double z = wa * std::sin(lat1) + wb * std::sin(lat2);
    return GeoPoint{rad2deg(std::atan2(z, std::hypot(x, y))), normalize_lon(rad2deg(std::atan2(y, x))), alt};
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_rad, double distance_m) {
    if (distance_m == 0.0) return origin;
    const double lat1 = deg2rad(origin.lat_deg);
    const double lon1 = deg2rad(origin.lon_deg);
    const double ang = distance_m / kEarthRadiusM;
    const double sin_lat2 = std::clamp(
        std::sin(lat1) * std::cos(ang) + std::cos(lat1) * std::sin(ang) * std::cos(bearing_rad), -1.0, 1.0);
    const double lat2 = std::asin(sin_lat2);
    const double lon2 = lon1 + std::atan2(std::sin(bearing_rad) * std::sin(ang) * std::cos(lat1),
                                          std::cos(ang) - std::sin(lat1) * sin_lat2);
    return GeoPoint{rad2deg(lat2), normalize_lon(rad2deg(lon2)), origin.alt_m};
}

PlaneVector local_displacement(const GeoPoint& origin, const GeoPoint& target) {
    if (origin.same_position(target)) return {};
    const double d = great_circle_distance(origin, target);
    if (d > kMaxLocalDistanceM)
        throw DistanceOutOfRange("local displacement of " + std::to_string(d) + " m exceeds 6,000 km");
    if (d == 0.0) return {};
    const double brg = initial_bearing(origin, target);
    return {d * std::sin(brg), d * std::cos(brg)};
}

GeoPoint displace(const GeoPoint& origin, const PlaneVector& v, double alt_delta_m) {
    const double d = v.norm();
    if (d > kMaxLocalDistanceM)
        throw DistanceOutOfRange("displacement of " + std::to_string(d) + " m exceeds 6,000 km");
    GeoPoint out = d == 0.0 ? origin : destination_point(origin, std::atan2(v.east_m, v.north_m), d);
    out.alt_m = std::max(0.0, origin.alt_m + alt_delta_m);
    return out;
}

RotationAngle trip_rotation(const GeoPoint& origin, const GeoPoint& destination) {
    if (origin.same_position(destination))
        throw DegenerateTrip("origin and destination coincide");
    const PlaneVector delta = local_displacement(origin, destination);
    if (delta.norm() == 0.0) throw DegenerateTrip("origin and destination coincide");
    double phi = std::numbers::pi / 2.0 - std::atan2(delta.north_m, delta.east_m);
    if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
    if (phi > std::numbers::pi) phi -= 2.0 * std::numbers::pi;
    return {phi};
}

PlaneVector rotate(const PlaneVector& v, RotationAngle phi) {
    const double c = std::cos(phi.radians);
    const double s = std::sin(phi.radians);
    return {c * v.east_m - s * v.north_m, s * v.east_m + c * v.north_m};
}

PlaneVector rotate_inverse(const PlaneVector& v, RotationAngle phi) {
    return rotate(v, RotationAngle{-phi.radians});
}

}  // namespace hfp
