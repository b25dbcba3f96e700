#include "hfp/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "hfp/errors.hpp"

namespace hfp {

// ---------------------------------------------------------------------------
// Configuration

void TrainConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
    if (!(clip_range >= 0.05 && clip_range <= 0.5)) fail("clip_range", "must be in [0.05, 0.5]");
    if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
    if (!(discount > 0.0 && discount <= 1.0)) fail("discount", "must be in (0, 1]");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda", "must be in [0, 1]");
    if (epochs_per_update < 1) fail("epochs_per_update", "must be >= 1");
    if (minibatch_size < 1) fail("minibatch_size", "must be >= 1");
    if (episodes_per_update < 1) fail("episodes_per_update", "must be >= 1");
    if (!(value_coef > 0.0)) fail("value_coef", "must be > 0");
    if (!(max_grad_norm > 0.0)) fail("max_grad_norm", "must be > 0");
    if (hidden.empty()) fail("hidden", "needs at least one layer");
    for (int w : hidden)
        if (w < 1) fail("hidden", "layer widths must be >= 1");
    if (!(reward_exponent > 0.0)) fail("reward_exponent", "must be > 0");
    if (!(rho1 >= 0.0)) fail("rho1", "must be >= 0");
    if (!(rho2 >= 0.0)) fail("rho2", "must be >= 0");
    if (!(progress_lambda > 0.0 && progress_lambda < 1.0)) fail("progress_lambda", "must be in (0, 1)");
    if (!(end_threshold >= 0.0)) fail("end_threshold", "must be >= 0");
    if (waypoints < 2) fail("waypoints", "must be >= 2");
    if (instances < 1) fail("instances", "must be >= 1");
    try {
        sample_bbox.validate();
    } catch (const InvalidArgument& e) {
        fail("sample_bbox", e.what());
    }
    if (!(min_trip_m >= 0.0)) fail("min_trip_m", "must be >= 0");
    if (!(cruise_alt_m >= 0.0)) fail("cruise_alt_m", "must be >= 0");
    if (checkpoint_every < 1) fail("checkpoint_every", "must be >= 1");
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"clip_range", c.clip_range},
            {"learning_rate", c.learning_rate},
            {"discount", c.discount},
            {"gae_lambda", c.gae_lambda},
            {"epochs_per_update", c.epochs_per_update},
            {"minibatch_size", c.minibatch_size},
            {"episodes_per_update", c.episodes_per_update},
            {"value_coef", c.value_coef},
            {"max_grad_norm", c.max_grad_norm},
            {"hidden", c.hidden},
            {"reward_exponent", c.reward_exponent},
            {"extra_end_reward", c.extra_end_reward},
            {"rho1", c.rho1},
            {"rho2", c.rho2},
            {"progress_lambda", c.progress_lambda},
            {"end_threshold", c.end_threshold},
            {"signed_progress", c.signed_progress},
            {"waypoints", c.waypoints},
            {"instances", c.instances},
            {"sample_bbox",
             {{"lat_min", c.sample_bbox.lat_min},
              {"lat_max", c.sample_bbox.lat_max},
              {"lon_min", c.sample_bbox.lon_min},
              {"lon_max", c.sample_bbox.lon_max}}},
            {"min_trip_m", c.min_trip_m},
            {"cruise_alt_m", c.cruise_alt_m},
            {"checkpoint_every", c.checkpoint_every},
            {"seed", c.seed}};
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const std::string& name) {
    if (!j.is_object() || !j.contains(name)) throw ConfigError(name + ": missing field");
    const auto& v = j.at(name);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(name + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(name + ": expected a number");
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

}  // namespace

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.clip_range = field<double>(j, "clip_range");
    c.learning_rate = field<double>(j, "learning_rate");
    c.discount = field<double>(j, "discount");
    c.gae_lambda = field<double>(j, "gae_lambda");
    c.epochs_per_update = field<int>(j, "epochs_per_update");
    c.minibatch_size = field<int>(j, "minibatch_size");
    c.episodes_per_update = field<int>(j, "episodes_per_update");
    c.value_coef = field<double>(j, "value_coef");
    c.max_grad_norm = field<double>(j, "max_grad_norm");
    c.hidden = field<std::vector<int>>(j, "hidden");
    c.reward_exponent = field<double>(j, "reward_exponent");
    c.extra_end_reward = field<bool>(j, "extra_end_reward");
    c.rho1 = field<double>(j, "rho1");
    c.rho2 = field<double>(j, "rho2");
    c.progress_lambda = field<double>(j, "progress_lambda");
    c.end_threshold = field<double>(j, "end_threshold");
    c.signed_progress = field<bool>(j, "signed_progress");
    c.waypoints = field<int>(j, "waypoints");
    c.instances = field<long long>(j, "instances");
    const auto bbox = field<nlohmann::json>(j, "sample_bbox");
    c.sample_bbox = {field<double>(bbox, "lat_min"), field<double>(bbox, "lat_max"), field<double>(bbox, "lon_min"),
                     field<double>(bbox, "lon_max")};
    c.min_trip_m = field<double>(j, "min_trip_m");
    c.cruise_alt_m = field<double>(j, "cruise_alt_m");
    c.checkpoint_every = field<int>(j, "checkpoint_every");
    c.seed = field<std::uint64_t>(j, "seed");
    c.validate();
    return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return train_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Instances and rewards

TripInstance sample_instance(const TrainConfig& cfg, std::mt19937_64& rng) {
    const BoundingBox& b = cfg.sample_bbox;
    std::uniform_real_distribution<double> lat(b.lat_min, b.lat_max);
    std::uniform_real_distribution<double> lon(b.lon_min, b.lon_max);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double lat1 = lat(rng), lon1 = lon(rng), lat2 = lat(rng), lon2 = lon(rng);
        const GeoPoint o = GeoPoint::make(lat1, lon1, cfg.cruise_alt_m);
        const GeoPoint d = GeoPoint::make(lat2, lon2, cfg.cruise_alt_m);
        if (great_circle_distance(o, d) >= cfg.min_trip_m && !o.same_position(d)) return {o, d};
    }
    throw SamplingExhausted("no trip longer than min_trip_m after 1,000 draws");
}

double progress_value(const PlaneVector& move, const PlaneVector& to_destination, double lambda, bool signed_progress) {
    const double dn = to_destination.norm();
    if (dn == 0.0) throw DegenerateDistance("distance vector to destination is zero");
    const double mn = move.norm();
    if (mn == 0.0) return -lambda;
    // |proj_D(move)| / |move| = |cos theta|
    const double cos_theta = move.dot(to_destination) / (mn * dn);
    return (signed_progress ? cos_theta : std::abs(cos_theta)) - lambda;
}

double step_reward(double progress, double fuel_kg, double gamma) {
    if (fuel_kg == 0.0) return 0.0;
    return -std::pow(1.0 - progress, gamma) * fuel_kg;
}

double end_reward(double distance, double threshold, double rho1, double rho2) {
    if (distance > threshold) return -rho1 * distance;
    return rho2 * (1.0 - distance);
}

double EpisodeRecord::total_reward() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }

namespace {

// Azimuthal-equidistant vector from `from` to `to` without the 6,000 km guard:
// a wandering policy can end up far from its destination during training.
PlaneVector heading_vector(const GeoPoint& from, const GeoPoint& to) {
    if (from.same_position(to)) return {};
    const double d = great_circle_distance(from, to);
    const double brg = initial_bearing(from, to);
    return {d * std::sin(brg), d * std::cos(brg)};
}

FeatureVector episode_features(const GeoPoint& x, const GeoPoint& destination, RotationAngle phi,
                               const WeatherField& field, double trip, const FeatureNormalization& norm) {
    const PlaneVector d = rotate(heading_vector(x, destination), phi);
    const WeatherSample w = field.sample(x);
    return {d.east_m / trip, d.north_m / trip, w.wind_east_ms / norm.wind_scale_ms, w.wind_north_ms / norm.wind_scale_ms,
            (w.temperature_k - norm.temp_offset_k) / norm.temp_scale_k};
}

}  // namespace

EpisodeRecord run_episode(const PolicyParams& params, const TrainConfig& cfg, const AircraftSpec& spec,
                          const TripInstance& instance, const WeatherField& field, std::mt19937_64& rng,
                          const FeatureNormalization& norm) {
    const GeoPoint& origin = instance.origin;
    const GeoPoint& destination = instance.destination;
    const int n = cfg.waypoints;
    const double trip = great_circle_distance(origin, destination);
    const double scale = step_scale(origin, destination, n);
    const RotationAngle phi = trip_rotation(origin, destination);

    EpisodeRecord ep;
    AircraftState state{origin, spec.ref_mass_kg};
    ep.positions.push_back(origin);
    for (int k = 0; k + 1 < n; ++k) {
        const GeoPoint x = state.position;
        const FeatureVector f = episode_features(x, destination, phi, field, trip, norm);
        const ActionSample a = policy_action(params, f, &rng);
        const double value = params.value(f);
        const GeoPoint next = guide_step(x, origin, destination, a.action, phi, n);

        const PlaneVector move = heading_vector(x, next);
        const PlaneVector to_dest = heading_vector(x, destination);
        const double v = to_dest.norm() == 0.0 ? -cfg.progress_lambda
                                                : progress_value(move, to_dest, cfg.progress_lambda, cfg.signed_progress);
        const SegmentResult seg = fly_segment(spec, state, next, field, 1);
        state = seg.end_state;

        ep.features.push_back(f);
        ep.actions.push_back(a.raw);
        ep.log_probs.push_back(a.log_prob);
        ep.values.push_back(value);
        ep.progress.push_back(v);
        ep.fuel_kg.push_back(seg.fuel_kg);
        ep.rewards.push_back(step_reward(v, seg.fuel_kg, cfg.reward_exponent));
        ep.positions.push_back(next);
    }
    ep.final_distance = great_circle_distance(state.position, destination) / scale;
    if (cfg.extra_end_reward) {
        ep.end_bonus = end_reward(ep.final_distance, cfg.end_threshold, cfg.rho1, cfg.rho2);
        ep.rewards.back() += ep.end_bonus;
    }
    return ep;
}

// ---------------------------------------------------------------------------
// PPO

TransitionBatch make_batch(const std::vector<EpisodeRecord>& episodes, const TrainConfig& cfg, bool normalize) {
    if (episodes.empty()) throw InvalidArgument("empty episode batch");
    Eigen::Index total = 0;
    for (const auto& ep : episodes) total += static_cast<Eigen::Index>(ep.steps());

    TransitionBatch b;
    b.features.resize(kFeatureDim, total);
    b.actions.resize(kActionDim, total);
    b.old_log_probs.resize(total);
    b.advantages.resize(total);
    b.returns.resize(total);
    b.old_values.resize(total);

    Eigen::Index col = 0;
    for (const auto& ep : episodes) {
        const auto steps = static_cast<Eigen::Index>(ep.steps());
        // Episodes always terminate after their last step: bootstrap value 0.
        double next_value = 0.0;
        double gae = 0.0;
        for (Eigen::Index t = steps - 1; t >= 0; --t) {
            const auto k = static_cast<std::size_t>(t);
            const double delta = ep.rewards[k] + cfg.discount * next_value - ep.values[k];
            gae = delta + cfg.discount * cfg.gae_lambda * gae;
            b.advantages(col + t) = gae;
            b.returns(col + t) = gae + ep.values[k];
            next_value = ep.values[k];
        }
        for (Eigen::Index t = 0; t < steps; ++t) {
            const auto k = static_cast<std::size_t>(t);
            for (int d = 0; d < kFeatureDim; ++d) b.features(d, col + t) = ep.features[k][static_cast<std::size_t>(d)];
            for (int d = 0; d < kActionDim; ++d) b.actions(d, col + t) = ep.actions[k][static_cast<std::size_t>(d)];
            b.old_log_probs(col + t) = ep.log_probs[k];
            b.old_values(col + t) = ep.values[k];
        }
        col += steps;
    }

    if (normalize && total > 1) {
        const double mean = b.advantages.mean();
        const double var = (b.advantages.array() - mean).square().mean();
        b.advantages = ((b.advantages.array() - mean) / (std::sqrt(var) + 1e-8)).matrix();
    }
    return b;
}

namespace {

Eigen::VectorXd log_probs(const Eigen::MatrixXd& means, const Eigen::Vector2d& log_std, const Eigen::MatrixXd& raw) {
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    Eigen::VectorXd lp = Eigen::VectorXd::Zero(raw.cols());
    for (int d = 0; d < kActionDim; ++d) {
        const Eigen::ArrayXd z = (raw.row(d) - means.row(d)).array() * std::exp(-log_std(d));
        lp.array() += -0.5 * z.square() - log_std(d) - kHalfLog2Pi;
    }
    return lp;
}

template <typename Index>
Eigen::MatrixXd gather_cols(const Eigen::MatrixXd& m, const std::vector<Index>& idx) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
    return out;
}

template <typename Index>
Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
    return out;
}

template <typename A, typename B>
void clip_norm(A&& a, B&& b, double max_norm) {
    const double norm = std::sqrt(a.squaredNorm() + b.squaredNorm());
    if (norm > max_norm) {
        a *= max_norm / norm;
        b *= max_norm / norm;
    }
}

}  // namespace

double surrogate_objective(const PolicyParams& params, const TransitionBatch& batch, double clip) {
    const Eigen::MatrixXd means = params.action_means(batch.features);
    const Eigen::VectorXd lp = log_probs(means, params.log_std(), batch.actions);
    double total = 0.0;
    for (Eigen::Index b = 0; b < batch.size(); ++b) {
        const double ratio = std::exp(lp(b) - batch.old_log_probs(b));
        const double a = batch.advantages(b);
        const double clipped = std::isinf(clip) ? ratio : std::clamp(ratio, 1.0 - clip, 1.0 + clip);
        total += std::min(ratio * a, clipped * a);
    }
    return total / static_cast<double>(batch.size());
}

std::pair<PolicyParams, UpdateStats> ppo_update(const PolicyParams& params, nn::Adam& optimizer,
                                                const std::vector<EpisodeRecord>& episodes, const TrainConfig& cfg,
                                                std::mt19937_64& rng) {
    const TransitionBatch batch = make_batch(episodes, cfg, true);
    PolicyParams next = params;
    nn::Adam opt = optimizer;
    if (opt.m.size() != next.theta().size()) opt.reset(next.theta().size());

    const double eps = cfg.clip_range;
    const Eigen::Index n = batch.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    UpdateStats stats;
    long long minibatches = 0;
    Eigen::VectorXd grad(next.theta().size());

    for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index start = 0; start < n; start += cfg.minibatch_size) {
            const Eigen::Index stop = std::min<Eigen::Index>(n, start + cfg.minibatch_size);
            const std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + stop);
            const auto mb = static_cast<double>(idx.size());
            const Eigen::MatrixXd x = gather_cols(batch.features, idx);
            const Eigen::MatrixXd u = gather_cols(batch.actions, idx);
            const Eigen::VectorXd old_lp = gather(batch.old_log_probs, idx);
            const Eigen::VectorXd adv = gather(batch.advantages, idx);
            const Eigen::VectorXd ret = gather(batch.returns, idx);

            nn::Tape actor_tape, critic_tape;
            const Eigen::MatrixXd means = next.action_means(x, &actor_tape);
            const Eigen::MatrixXd vals = next.values(x, &critic_tape);
            const Eigen::Vector2d log_std = next.log_std();
            const Eigen::VectorXd lp = log_probs(means, log_std, u);

            Eigen::MatrixXd d_means = Eigen::MatrixXd::Zero(kActionDim, x.cols());
            Eigen::Vector2d d_log_std = Eigen::Vector2d::Zero();
            double actor_loss = 0.0, clipped = 0.0, kl = 0.0;
            for (Eigen::Index b = 0; b < x.cols(); ++b) {
                const double log_ratio = lp(b) - old_lp(b);
                const double ratio = std::exp(log_ratio);
                const double s1 = ratio * adv(b);
                const double s2 = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv(b);
                actor_loss -= std::min(s1, s2) / mb;
                if (std::abs(ratio - 1.0) > eps) clipped += 1.0;
                kl += (ratio - 1.0) - log_ratio;
                // d(-min(s1, s2))/d(log p): only the unclipped branch carries gradient.
                const double d_lp = s1 <= s2 ? -s1 / mb : 0.0;
                for (int d = 0; d < kActionDim; ++d) {
                    const double inv_var = std::exp(-2.0 * log_std(d));
                    const double diff = u(d, b) - means(d, b);
                    d_means(d, b) = d_lp * diff * inv_var;
                    d_log_std(d) += d_lp * (diff * diff * inv_var - 1.0);
                }
            }
            const Eigen::RowVectorXd verr = vals.row(0) - ret.transpose();
            const double critic_loss = verr.squaredNorm() / mb;
            const Eigen::MatrixXd d_vals = (cfg.value_coef * 2.0 / mb) * verr;

            grad.setZero();
            nn::backward(next.actor_shape(), next.actor_data(), actor_tape, d_means, grad.data());
            nn::backward(next.critic_shape(), next.critic_data(), critic_tape, d_vals,
                         grad.data() + next.actor_offset_end());
            grad.tail<kActionDim>() += d_log_std;

            if (!grad.allFinite()) throw NonFiniteGradient("non-finite gradient; update aborted");
            // Actor (with log_std) and critic are clipped separately: fuel-scale
            // returns make critic gradients orders of magnitude larger.
            const Eigen::Index a_end = next.actor_offset_end();
            const Eigen::Index c_len = next.critic_offset_end() - a_end;
            clip_norm(grad.head(a_end), grad.tail<kActionDim>(), cfg.max_grad_norm);
            auto critic_grad = grad.segment(a_end, c_len);
            const double c_norm = critic_grad.norm();
            if (c_norm > cfg.max_grad_norm) critic_grad *= cfg.max_grad_norm / c_norm;
            opt.step(next.theta(), grad, cfg.learning_rate);
            if (!next.all_finite()) throw NonFiniteGradient("parameters became non-finite; update aborted");

            stats.actor_loss += actor_loss;
            stats.critic_loss += critic_loss;
            stats.clip_fraction += clipped / mb;
            stats.approx_kl += kl / mb;
            ++minibatches;
        }
    }
    if (minibatches > 0) {
        const auto k = static_cast<double>(minibatches);
        stats.actor_loss /= k;
        stats.critic_loss /= k;
        stats.clip_fraction /= k;
        stats.approx_kl /= k;
    }
    optimizer = std::move(opt);
    return {std::move(next), stats};
}

// ---------------------------------------------------------------------------
// Training loop

nlohmann::json training_state_json(const TrainingState& s) {
    const auto& m = s.optimizer.m;
    const auto& v = s.optimizer.v;
    return {{"update_index", s.update_index},
            {"instances_done", s.instances_done},
            {"rng_state", s.rng_state},
            {"adam",
             {{"t", s.optimizer.t},
              {"m", std::vector<double>(m.data(), m.data() + m.size())},
              {"v", std::vector<double>(v.data(), v.data() + v.size())}}}};
}

TrainingState training_state_from_checkpoint(const PolicyCheckpoint& checkpoint) {
    if (checkpoint.training.is_null()) throw SchemaError("checkpoint has no training state to resume from");
    try {
        const auto& t = checkpoint.training;
        TrainingState s{checkpoint.params, {}, t.at("rng_state").get<std::string>(), t.at("update_index").get<long long>(),
                        t.at("instances_done").get<long long>()};
        const auto m = t.at("adam").at("m").get<std::vector<double>>();
        const auto v = t.at("adam").at("v").get<std::vector<double>>();
        s.optimizer.t = t.at("adam").at("t").get<long long>();
        if (!m.empty()) {
            if (m.size() != static_cast<std::size_t>(s.params.theta().size()) || v.size() != m.size())
                throw SchemaError("optimizer state does not match the parameter count");
            s.optimizer.m = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
            s.optimizer.v = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed training state: ") + e.what());
    }
}

FieldGenerator uniform_field_generator(double wind_east_ms, double wind_north_ms, double temperature_k) {
    auto field = std::make_shared<const WeatherField>(make_uniform(wind_east_ms, wind_north_ms, temperature_k, kGlobalBox));
    return [field](long long) { return field; };
}

namespace {

std::string number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string format_log_header() {
    return "update_index,mean_reward,mean_final_dist,actor_loss,critic_loss,clip_fraction,approx_kl";
}

std::string format_log_row(const TrainLogRow& r) {
    return std::to_string(r.update_index) + "," + number(r.mean_reward) + "," + number(r.mean_final_dist) + "," +
           number(r.stats.actor_loss) + "," + number(r.stats.critic_loss) + "," + number(r.stats.clip_fraction) + "," +
           number(r.stats.approx_kl);
}

TrainResult train(const TrainConfig& cfg, const AircraftSpec& spec, const FieldGenerator& fields,
                  const TrainHooks& hooks, const TrainingState* resume) {
    cfg.validate();
    spec.validate();
    if (!fields) throw InvalidArgument("training needs a field generator");

    TrainResult result{resume != nullptr ? *resume
                                         : TrainingState{PolicyParams::initialized(cfg.seed, cfg.hidden), {}, {}, 0, 0},
                       {},
                       {}};
    TrainingState& state = result.state;
    if (state.params.hidden() != cfg.hidden) throw ConfigError("hidden: does not match the resumed checkpoint");

    std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    if (!state.rng_state.empty()) {
        std::istringstream in(state.rng_state);
        in >> rng;
        if (!in) throw SchemaError("unreadable rng state in checkpoint");
    }

    while (state.instances_done < cfg.instances) {
        const long long batch_n = std::min<long long>(cfg.episodes_per_update, cfg.instances - state.instances_done);
        std::vector<EpisodeRecord> episodes;
        episodes.reserve(static_cast<std::size_t>(batch_n));
        double reward_sum = 0.0, dist_sum = 0.0;
        for (long long e = 0; e < batch_n; ++e) {
            const TripInstance inst = sample_instance(cfg, rng);
            const auto field = fields(state.instances_done + e);
            episodes.push_back(run_episode(state.params, cfg, spec, inst, *field, rng));
            const EpisodeSummary summary{episodes.back().total_reward(), episodes.back().final_distance};
            reward_sum += summary.total_reward;
            dist_sum += summary.final_distance;
            result.episodes.push_back(summary);
        }
        auto [params, stats] = ppo_update(state.params, state.optimizer, episodes, cfg, rng);
        state.params = std::move(params);
        state.instances_done += batch_n;

        TrainLogRow row{state.update_index, reward_sum / static_cast<double>(batch_n),
                        dist_sum / static_cast<double>(batch_n), stats};
        result.log.push_back(row);
        ++state.update_index;

        std::ostringstream rng_out;
        rng_out << rng;
        state.rng_state = rng_out.str();

        if (hooks.progress) {
            hooks.progress("update " + std::to_string(row.update_index) + " instances " +
                           std::to_string(state.instances_done) + "/" + std::to_string(cfg.instances) +
                           " mean_reward " + number(row.mean_reward) + " mean_final_dist " +
                           number(row.mean_final_dist) + " kl " + number(stats.approx_kl));
        }
        if (hooks.log_row) hooks.log_row(row);
        if (hooks.checkpoint && state.update_index % cfg.checkpoint_every == 0) hooks.checkpoint(state);
    }
    return result;
}

}  // namespace hfp
