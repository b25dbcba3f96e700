#include "hfp/weather.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "hfp/errors.hpp"

namespace hfp {

namespace {

constexpr double kIsaTemperatureK = 288.15;
constexpr double kMinTemperatureK = 180.0;
constexpr double kMaxTemperatureK = 330.0;
constexpr double kMaxWindMs = 150.0;

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.size() < 2) throw InvalidArgument(std::string(name) + " axis needs at least 2 points");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1]))
            throw InvalidArgument(std::string(name) + " axis must be strictly ascending");
    }
}

// Index of the cell [axis[k], axis[k+1]] holding v; v is known to be in range.
std::size_t cell_index(std::span<const double> axis, double v) {
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    auto k = static_cast<std::size_t>(std::distance(axis.begin(), it));
    if (k == 0) return 0;
    return std::min(k - 1, axis.size() - 2);
}

std::vector<double> make_axis(double lo, double hi, double step) {
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
    std::vector<double> axis(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(axis.size() - 1);
    return axis;
}

}  // namespace

void BoundingBox::validate() const {
    if (!(lat_min < lat_max) || lat_min < -90.0 || lat_max > 90.0)
        throw InvalidArgument("bounding box latitude range invalid");
    if (!(lon_min < lon_max) || lon_min < -180.0 || lon_max > 180.0)
        throw InvalidArgument("bounding box longitude range invalid");
}

WeatherField::WeatherField(std::vector<double> lat_axis, std::vector<double> lon_axis,
                           std::vector<double> wind_east, std::vector<double> wind_north,
                           std::vector<double> temperature)
    : lat_(std::move(lat_axis)), lon_(std::move(lon_axis)), we_(std::move(wind_east)),
      wn_(std::move(wind_north)), t_(std::move(temperature)) {
    check_axis(lat_, "latitude");
    check_axis(lon_, "longitude");
    if (lat_.front() < -90.0 || lat_.back() > 90.0) throw InvalidArgument("latitude axis outside [-90, 90]");
    if (lon_.front() < -180.0 || lon_.back() > 180.0) throw InvalidArgument("longitude axis outside [-180, 180]");
    const std::size_t n = lat_.size() * lon_.size();
    if (we_.size() != n || wn_.size() != n || t_.size() != n)
        throw InvalidArgument("grid size does not match |lat| x |lon|");

    min_t_ = kMaxTemperatureK;
    max_t_ = kMinTemperatureK;
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(we_[k]) || !std::isfinite(wn_[k]) || !std::isfinite(t_[k]))
            throw InvalidArgument("non-finite weather value");
        const double speed = std::hypot(we_[k], wn_[k]);
        if (speed > kMaxWindMs) throw InvalidArgument("wind speed above 150 m/s: " + std::to_string(speed));
        if (t_[k] < kMinTemperatureK || t_[k] > kMaxTemperatureK)
            throw InvalidArgument("temperature outside [180, 330] K: " + std::to_string(t_[k]));
        max_wind_ = std::max(max_wind_, speed);
        min_t_ = std::min(min_t_, t_[k]);
        max_t_ = std::max(max_t_, t_[k]);
    }
}

double WeatherField::max_isa_deviation() const {
    return std::max(std::abs(min_t_ - kIsaTemperatureK), std::abs(max_t_ - kIsaTemperatureK));
}

bool WeatherField::contains(const GeoPoint& p) const {
    return bbox().contains(p.lat_deg, normalize_lon(p.lon_deg));
}

WeatherSample WeatherField::sample(const GeoPoint& p) const {
    const double lat = p.lat_deg;
    const double lon = normalize_lon(p.lon_deg);
    if (!bbox().contains(lat, lon))
        throw OutOfDomain("point (" + std::to_string(lat) + ", " + std::to_string(lon) + ") outside weather grid");

    const std::size_t i = cell_index(lat_, lat);
    const std::size_t j = cell_index(lon_, lon);
    const double u = (lat - lat_[i]) / (lat_[i + 1] - lat_[i]);
    const double v = (lon - lon_[j]) / (lon_[j + 1] - lon_[j]);
    const std::size_t nlon = lon_.size();
    const std::size_t k00 = i * nlon + j, k01 = k00 + 1, k10 = k00 + nlon, k11 = k10 + 1;
    auto lerp2 = [&](const std::vector<double>& g) {
        return (1.0 - u) * ((1.0 - v) * g[k00] + v * g[k01]) + u * ((1.0 - v) * g[k10] + v * g[k11]);
    };
    return {lerp2(we_), lerp2(wn_), lerp2(t_)};
}

WeatherField make_uniform(double wind_east_ms, double wind_north_ms, double temperature_k,
                          const BoundingBox& bbox) {
    bbox.validate();
    return WeatherField({bbox.lat_min, bbox.lat_max}, {bbox.lon_min, bbox.lon_max},
                        std::vector<double>(4, wind_east_ms), std::vector<double>(4, wind_north_ms),
                        std::vector<double>(4, temperature_k));
}

WeatherField make_jet_stream(const BoundingBox& bbox, const JetStreamParams& params) {
    bbox.validate();
    if (params.core_speed_ms < 0.0 || params.core_speed_ms > 120.0)
        throw InvalidArgument("jet core speed must be in [0, 120] m/s");
    if (!(params.half_width_deg > 0.0)) throw InvalidArgument("jet half width must be positive");
    if (params.perturbation_fraction < 0.0 || params.perturbation_fraction > 0.1)
        throw InvalidArgument("perturbation fraction must be in [0, 0.1]");
    if (!(params.resolution_deg > 0.0)) throw InvalidArgument("grid resolution must be positive");

    struct Wave {
        double amp, k_lat, k_lon, phase;
    };
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_waves = [&] {
        const int count = 1 + static_cast<int>(unit(rng) * 5.0) % 5;
        std::vector<Wave> waves(static_cast<std::size_t>(count));
        double weight_sum = 0.0;
        for (auto& w : waves) {
            w.amp = 0.2 + unit(rng);
            weight_sum += w.amp;
            // Wavelengths between 10 and 40 degrees.
            const double wavelength = 10.0 + 30.0 * unit(rng);
            const double dir = 2.0 * std::numbers::pi * unit(rng);
            const double k = 2.0 * std::numbers::pi / wavelength;
            w.k_lat = k * std::sin(dir);
            w.k_lon = k * std::cos(dir);
            w.phase = 2.0 * std::numbers::pi * unit(rng);
        }
        const double budget = params.perturbation_fraction * params.core_speed_ms;
        for (auto& w : waves) w.amp *= budget / weight_sum;
        return waves;
    };
    const std::vector<Wave> east_waves = draw_waves();
    const std::vector<Wave> north_waves = draw_waves();
    auto perturb = [](const std::vector<Wave>& waves, double lat, double lon) {
        double s = 0.0;
        for (const auto& w : waves) s += w.amp * std::sin(w.k_lat * lat + w.k_lon * lon + w.phase);
        return s;
    };

    std::vector<double> lats = make_axis(bbox.lat_min, bbox.lat_max, params.resolution_deg);
    std::vector<double> lons = make_axis(bbox.lon_min, bbox.lon_max, params.resolution_deg);
    const std::size_t n = lats.size() * lons.size();
    std::vector<double> we(n), wn(n), t(n);
    for (std::size_t i = 0; i < lats.size(); ++i) {
        const double z = (lats[i] - params.core_lat_deg) / params.half_width_deg;
        const double profile = params.core_speed_ms * std::exp(-z * z);
        const double temp = std::clamp(kIsaTemperatureK - 0.5 * (lats[i] - params.core_lat_deg),
                                       kMinTemperatureK, kMaxTemperatureK);
        for (std::size_t j = 0; j < lons.size(); ++j) {
            const std::size_t k = i * lons.size() + j;
            we[k] = profile + perturb(east_waves, lats[i], lons[j]);
            wn[k] = perturb(north_waves, lats[i], lons[j]);
            t[k] = temp;
        }
    }
    return WeatherField(std::move(lats), std::move(lons), std::move(we), std::move(wn), std::move(t));
}

namespace {

constexpr std::array<const char*, 5> kCsvColumns{"lat_deg", "lon_deg", "wind_east_ms", "wind_north_ms",
                                                 "temperature_k"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

}  // namespace

WeatherField load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weather file " + path.string());
    const std::string source = path.filename().string();

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw SchemaError(source + ": empty file, header required");
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);  // UTF-8 BOM
    const auto header = split_csv_line(line);
    std::array<std::size_t, 5> col{};
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return trim(h) == kCsvColumns[c]; });
        if (it == header.end()) throw SchemaError(source + ": missing column '" + kCsvColumns[c] + "'");
        col[c] = static_cast<std::size_t>(std::distance(header.begin(), it));
    }

    std::map<std::pair<double, double>, std::array<double, 3>> nodes;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError(source, line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                  std::to_string(cells.size()));
        std::array<double, 5> v{};
        for (std::size_t c = 0; c < 5; ++c) {
            const std::string cell = trim(cells[col[c]]);
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, v[c]);
            if (ec != std::errc() || ptr != last || cell.empty())
                throw ParseError(source, line_no, std::string("bad number in column '") + kCsvColumns[c] + "'");
        }
        if (!nodes.emplace(std::make_pair(v[0], v[1]), std::array<double, 3>{v[2], v[3], v[4]}).second)
            throw ParseError(source, line_no, "duplicate grid node");
    }
    if (nodes.empty()) throw SchemaError(source + ": no data rows");

    std::vector<double> lats, lons;
    for (const auto& [key, _] : nodes) {
        lats.push_back(key.first);
        lons.push_back(key.second);
    }
    std::sort(lats.begin(), lats.end());
    lats.erase(std::unique(lats.begin(), lats.end()), lats.end());
    std::sort(lons.begin(), lons.end());
    lons.erase(std::unique(lons.begin(), lons.end()), lons.end());
    if (nodes.size() != lats.size() * lons.size())
        throw SchemaError(source + ": rows do not form a complete lat x lon grid");

    const std::size_t n = nodes.size();
    std::vector<double> we(n), wn(n), t(n);
    for (std::size_t i = 0; i < lats.size(); ++i) {
        for (std::size_t j = 0; j < lons.size(); ++j) {
            const auto& vals = nodes.at({lats[i], lons[j]});
            const std::size_t k = i * lons.size() + j;
            we[k] = vals[0];
            wn[k] = vals[1];
            t[k] = vals[2];
        }
    }
    try {
        return WeatherField(std::move(lats), std::move(lons), std::move(we), std::move(wn), std::move(t));
    } catch (const InvalidArgument& e) {
        throw SchemaError(source + ": " + e.what());
    }
}

void save_csv(const WeatherField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write weather file " + path.string());
    out << "lat_deg,lon_deg,wind_east_ms,wind_north_ms,temperature_k\n";
    // Shortest round-trip representation keeps save/load bit-exact.
    auto put = [&out](double v, char sep) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, ptr - buf);
        out.put(sep);
    };
    const auto lats = field.lat_axis();
    const auto lons = field.lon_axis();
    for (std::size_t i = 0; i < lats.size(); ++i) {
        for (std::size_t j = 0; j < lons.size(); ++j) {
            const WeatherSample s = field.node(i, j);
            put(lats[i], ',');
            put(lons[j], ',');
            put(s.wind_east_ms, ',');
            put(s.wind_north_ms, ',');
            put(s.temperature_k, '\n');
        }
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hfp
