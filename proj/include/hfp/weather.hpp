#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hfp/geo.hpp"

namespace hfp {

struct WeatherSample {
    double wind_east_ms = 0.0;
    double wind_north_ms = 0.0;
    double temperature_k = 0.0;
};

/// Latitude/longitude box, degrees. Longitudes must not straddle the antimeridian.
struct BoundingBox {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;

    void validate() const;
    bool contains(double lat_deg, double lon_deg) const {
        return lat_deg >= lat_min && lat_deg <= lat_max && lon_deg >= lon_min && lon_deg <= lon_max;
    }
};

/// Whole-globe box, used for fields that must never run out of domain.
inline constexpr BoundingBox kGlobalBox{-90.0, 90.0, -180.0, 180.0};

/// Gridded wind/temperature field on a regular or irregular lat/lon grid,
/// bilinearly interpolated. Grids are stored row-major: index = ilat * nlon + ilon.
/// Immutable once constructed.
class WeatherField {
public:
    WeatherField(std::vector<double> lat_axis, std::vector<double> lon_axis,
                 std::vector<double> wind_east, std::vector<double> wind_north,
                 std::vector<double> temperature);

    /// Throws OutOfDomain outside the grid box; no extrapolation.
    WeatherSample sample(const GeoPoint& p) const;
    bool contains(const GeoPoint& p) const;

    std::span<const double> lat_axis() const { return lat_; }
    std::span<const double> lon_axis() const { return lon_; }
    std::span<const double> wind_east() const { return we_; }
    std::span<const double> wind_north() const { return wn_; }
    std::span<const double> temperature() const { return t_; }
    BoundingBox bbox() const { return {lat_.front(), lat_.back(), lon_.front(), lon_.back()}; }

    /// Largest wind speed over all nodes. Bilinear samples never exceed it.
    double max_wind_speed() const { return max_wind_; }
    double min_temperature() const { return min_t_; }
    double max_temperature() const { return max_t_; }
    /// Largest |T - 288.15| over the grid.
    double max_isa_deviation() const;

    WeatherSample node(std::size_t ilat, std::size_t ilon) const {
        const std::size_t k = ilat * lon_.size() + ilon;
        return {we_[k], wn_[k], t_[k]};
    }

private:
    std::vector<double> lat_, lon_, we_, wn_, t_;
    double max_wind_ = 0.0;
    double min_t_ = 0.0;
    double max_t_ = 0.0;
};

WeatherField make_uniform(double wind_east_ms, double wind_north_ms, double temperature_k,
                          const BoundingBox& bbox);

struct JetStreamParams {
    double core_lat_deg = 50.0;
    double core_speed_ms = 50.0;
    double half_width_deg = 6.0;
    /// Total amplitude of the smooth perturbation as a fraction of core speed (<= 0.1).
    double perturbation_fraction = 0.1;
    /// Grid spacing, degrees.
    double resolution_deg = 0.5;
    std::uint64_t seed = 0;
};

/// Eastward jet with a Gaussian latitude profile, a seeded sum of at most
/// five sinusoids as perturbation on both components, and a mild meridional
/// temperature gradient around 288.15 K at the core latitude.
WeatherField make_jet_stream(const BoundingBox& bbox, const JetStreamParams& params);

/// CSV grid format: header `lat_deg,lon_deg,wind_east_ms,wind_north_ms,temperature_k`,
/// then one row per grid node in any order.
WeatherField load_csv(const std::filesystem::path& path);
void save_csv(const WeatherField& field, const std::filesystem::path& path);

}  // namespace hfp
