#include "hfp/guide.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "hfp/errors.hpp"

namespace hfp {

namespace {

std::vector<int> mlp_sizes(const std::vector<int>& hidden, int output) {
    std::vector<int> sizes{kFeatureDim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output);
    return sizes;
}

Eigen::MatrixXd to_column(const FeatureVector& f) {
    Eigen::MatrixXd x(kFeatureDim, 1);
    for (int k = 0; k < kFeatureDim; ++k) x(k, 0) = f[static_cast<std::size_t>(k)];
    return x;
}

}  // namespace

PolicyParams::PolicyParams(std::vector<int> hidden)
    : hidden_(std::move(hidden)), actor_{mlp_sizes(hidden_, kActionDim)}, critic_{mlp_sizes(hidden_, 1)} {
    for (int width : hidden_)
        if (width < 1) throw InvalidArgument("hidden layer width must be >= 1");
    theta_ = Eigen::VectorXd::Zero(critic_offset_end() + kActionDim);
}

PolicyParams PolicyParams::initialized(std::uint64_t seed, std::vector<int> hidden) {
    PolicyParams p(std::move(hidden));
    std::mt19937_64 rng(seed);
    nn::init_orthogonal(p.actor_, p.theta_.data(), 0.01, rng);
    nn::init_orthogonal(p.critic_, p.theta_.data() + p.actor_offset_end(), 1.0, rng);
    p.theta_.tail<kActionDim>().setZero();
    return p;
}

PolicyParams PolicyParams::zeros(std::vector<int> hidden) { return PolicyParams(std::move(hidden)); }

Eigen::MatrixXd PolicyParams::action_means(const Eigen::MatrixXd& features, nn::Tape* tape) const {
    return nn::forward(actor_, actor_data(), features, tape);
}

Eigen::MatrixXd PolicyParams::values(const Eigen::MatrixXd& features, nn::Tape* tape) const {
    return nn::forward(critic_, critic_data(), features, tape);
}

double PolicyParams::value(const FeatureVector& f) const { return values(to_column(f))(0, 0); }

std::string to_string(GuideKind kind) { return kind == GuideKind::Policy ? "policy" : "great_circle"; }

GuideKind guide_kind_from_string(const std::string& s) {
    if (s == "policy") return GuideKind::Policy;
    if (s == "great_circle") return GuideKind::GreatCircle;
    throw InvalidArgument("unknown guide kind '" + s + "' (expected policy or great_circle)");
}

FeatureVector extract_features(const GeoPoint& x, const GeoPoint& destination, RotationAngle phi,
                               const WeatherField& field, double trip_length_m, const FeatureNormalization& norm) {
    if (!(trip_length_m > 0.0)) throw DegenerateTrip("trip length must be positive");
    const PlaneVector d = rotate(local_displacement(x, destination), phi);
    const WeatherSample w = field.sample(x);
    return {d.east_m / trip_length_m, d.north_m / trip_length_m, w.wind_east_ms / norm.wind_scale_ms,
            w.wind_north_ms / norm.wind_scale_ms, (w.temperature_k - norm.temp_offset_k) / norm.temp_scale_k};
}

double gaussian_log_prob(const Action& raw, const Eigen::Vector2d& mean, const Eigen::Vector2d& log_std) {
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    double lp = 0.0;
    for (int k = 0; k < kActionDim; ++k) {
        const double z = (raw[static_cast<std::size_t>(k)] - mean(k)) * std::exp(-log_std(k));
        lp += -0.5 * z * z - log_std(k) - kHalfLog2Pi;
    }
    return lp;
}

ActionSample policy_action(const PolicyParams& params, const FeatureVector& features, std::mt19937_64* rng) {
    const Eigen::MatrixXd mean = params.action_means(to_column(features));
    const Eigen::Vector2d log_std = params.log_std();
    ActionSample s;
    for (int k = 0; k < kActionDim; ++k) {
        double u = mean(k, 0);
        if (rng != nullptr) {
            std::normal_distribution<double> normal(0.0, 1.0);
            u += std::exp(log_std(k)) * normal(*rng);
        }
        s.raw[static_cast<std::size_t>(k)] = u;
        s.action[static_cast<std::size_t>(k)] = std::tanh(u);
    }
    s.log_prob = gaussian_log_prob(s.raw, mean.col(0), log_std);
    return s;
}

double step_scale(const GeoPoint& trip_origin, const GeoPoint& destination, int waypoints) {
    if (waypoints < 2) throw InvalidArgument("waypoint count must be >= 2");
    return great_circle_distance(trip_origin, destination) / waypoints;
}

GeoPoint guide_step(const GeoPoint& x_k, const GeoPoint& trip_origin, const GeoPoint& destination,
                    const Action& action, RotationAngle phi, int waypoints, double alt_delta_m) {
    const double scale = step_scale(trip_origin, destination, waypoints);
    PlaneVector move = rotate_inverse({action[0] * scale, action[1] * scale}, phi);
    // The [-1, 1]^2 box allows norms up to sqrt(2) * scale; cap at one step.
    const double norm = move.norm();
    if (norm > scale) move = (scale / norm) * move;
    return displace(x_k, move, alt_delta_m);
}

CoarseRoute roll_out(const GuideConfig& config, const PolicyParams* params, const GeoPoint& origin,
                     const GeoPoint& destination, const WeatherField& field, std::span<const double> altitude_deltas) {
    const int n = config.waypoints;
    if (n < 2) throw InvalidArgument("waypoint count must be >= 2");
    if (origin.same_position(destination)) throw DegenerateTrip("origin and destination coincide");

    CoarseRoute route;
    route.waypoints.reserve(static_cast<std::size_t>(n));
    if (config.kind == GuideKind::GreatCircle) {
        for (int k = 0; k < n; ++k)
            route.waypoints.push_back(intermediate_point(origin, destination, static_cast<double>(k) / (n - 1)));
        route.waypoints.front() = origin;
        route.waypoints.back() = destination;
        return route;
    }

    if (params == nullptr) throw InvalidArgument("policy guide requires policy parameters");
    const RotationAngle phi = trip_rotation(origin, destination);
    const double trip = great_circle_distance(origin, destination);
    GeoPoint x = origin;
    route.waypoints.push_back(x);
    for (int k = 0; k + 2 < n; ++k) {
        const FeatureVector f = extract_features(x, destination, phi, field, trip, config.normalization);
        const ActionSample a = policy_action(*params, f);
        const double dh = static_cast<std::size_t>(k) < altitude_deltas.size() ? altitude_deltas[k] : 0.0;
        x = guide_step(x, origin, destination, a.action, phi, n, dh);
        route.waypoints.push_back(x);
    }
    route.waypoints.push_back(destination);
    return route;
}

nlohmann::json checkpoint_json(const PolicyParams& params, const FeatureNormalization& norm,
                               const nlohmann::json& training) {
    const Eigen::VectorXd& th = params.theta();
    auto slice = [&](std::ptrdiff_t a, std::ptrdiff_t b) { return std::vector<double>(th.data() + a, th.data() + b); };
    nlohmann::json j;
    j["schema_version"] = kCheckpointSchemaVersion;
    j["architecture"] = {{"input_dim", kFeatureDim},
                         {"hidden", params.hidden()},
                         {"activation", "tanh"},
                         {"action_dim", kActionDim},
                         {"action_squash", "tanh"},
                         {"shared_trunk", false}};
    j["normalization"] = {{"displacement", "trip_length"},
                          {"wind_scale_ms", norm.wind_scale_ms},
                          {"temp_offset_k", norm.temp_offset_k},
                          {"temp_scale_k", norm.temp_scale_k}};
    j["weights"] = {{"actor", slice(0, params.actor_offset_end())},
                    {"critic", slice(params.actor_offset_end(), params.critic_offset_end())},
                    {"log_std", slice(params.critic_offset_end(), th.size())}};
    if (!training.is_null()) j["training"] = training;
    return j;
}

PolicyCheckpoint checkpoint_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != kCheckpointSchemaVersion)
            throw SchemaError("unsupported checkpoint schema version " + j.at("schema_version").dump());
        const auto& arch = j.at("architecture");
        if (arch.at("input_dim").get<int>() != kFeatureDim || arch.at("action_dim").get<int>() != kActionDim ||
            arch.at("activation").get<std::string>() != "tanh")
            throw SchemaError("checkpoint architecture does not match this build");
        PolicyParams params(arch.at("hidden").get<std::vector<int>>());
        const auto actor = j.at("weights").at("actor").get<std::vector<double>>();
        const auto critic = j.at("weights").at("critic").get<std::vector<double>>();
        const auto log_std = j.at("weights").at("log_std").get<std::vector<double>>();
        if (static_cast<std::ptrdiff_t>(actor.size()) != params.actor_offset_end() ||
            static_cast<std::ptrdiff_t>(critic.size()) != params.critic_offset_end() - params.actor_offset_end() ||
            log_std.size() != static_cast<std::size_t>(kActionDim))
            throw SchemaError("checkpoint weight arrays have the wrong length");
        Eigen::VectorXd& th = params.theta();
        std::copy(actor.begin(), actor.end(), th.data());
        std::copy(critic.begin(), critic.end(), th.data() + params.actor_offset_end());
        std::copy(log_std.begin(), log_std.end(), th.data() + params.critic_offset_end());
        if (!params.all_finite()) throw SchemaError("checkpoint contains non-finite weights");

        FeatureNormalization norm;
        const auto& nj = j.at("normalization");
        norm.wind_scale_ms = nj.at("wind_scale_ms").get<double>();
        norm.temp_offset_k = nj.at("temp_offset_k").get<double>();
        norm.temp_scale_k = nj.at("temp_scale_k").get<double>();
        return {std::move(params), norm, j.contains("training") ? j.at("training") : nlohmann::json()};
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params, const FeatureNormalization& norm,
                     const nlohmann::json& training) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << checkpoint_json(params, norm, training).dump() << '\n';
    if (!out) throw IoError("write failed for checkpoint " + path.string());
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace hfp
