#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfp/guide.hpp"
#include "hfp/perfmodel.hpp"
#include "hfp/weather.hpp"

namespace hfp {

struct TrainConfig {
    // PPO
    double clip_range = 0.2;
    double learning_rate = 5e-6;
    double discount = 0.99;
    double gae_lambda = 0.95;
    int epochs_per_update = 10;
    int minibatch_size = 64;
    int episodes_per_update = 128;
    double value_coef = 0.5;
    double max_grad_norm = 0.5;
    std::vector<int> hidden = {64, 64};

    // Reward shaping
    double reward_exponent = 2.0;  // gamma in -(1 - V)^gamma * F
    bool extra_end_reward = true;
    double rho1 = 5.0;
    double rho2 = 2.0;
    double progress_lambda = 0.01;
    double end_threshold = 0.5;  // in step_scale units
    bool signed_progress = false;

    // Instances
    int waypoints = 5;
    long long instances = 16'000;
    BoundingBox sample_bbox{34.0, 71.0, -10.0, 35.0};
    double min_trip_m = 500'000.0;
    double cruise_alt_m = 10'668.0;

    int checkpoint_every = 10;  // updates
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
/// Every field is required; a missing or mistyped field raises ConfigError
/// with the field name.
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

struct TripInstance {
    GeoPoint origin;
    GeoPoint destination;
};

/// Uniform lat/lon pairs in the sample box, re-drawn while closer than
/// min_trip_m. Throws SamplingExhausted after 1,000 rejections.
TripInstance sample_instance(const TrainConfig& cfg, std::mt19937_64& rng);

/// |cos| of the angle between the move and the direction to the destination
/// (signed cos when `signed_progress`), minus lambda. A zero move yields -lambda.
double progress_value(const PlaneVector& move, const PlaneVector& to_destination, double lambda,
                      bool signed_progress = false);

/// -(1 - V)^gamma * fuel.
double step_reward(double progress, double fuel_kg, double gamma);

/// -rho1 * D above the threshold, rho2 * (1 - D) at or below it.
double end_reward(double distance, double threshold, double rho1 = 5.0, double rho2 = 2.0);

struct EpisodeRecord {
    std::vector<FeatureVector> features;
    std::vector<Action> actions;  // pre-squash samples
    std::vector<double> log_probs;
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<double> progress;  // V_k
    std::vector<double> fuel_kg;   // F_k
    std::vector<GeoPoint> positions;  // n points visited, starting at the origin
    double final_distance = 0.0;      // in step_scale units
    double end_bonus = 0.0;

    double total_reward() const;
    std::size_t steps() const { return rewards.size(); }
};

/// n-1 stochastic guide steps with the shaped reward. Mass starts at the
/// aircraft reference mass and is threaded through the steps.
EpisodeRecord run_episode(const PolicyParams& params, const TrainConfig& cfg, const AircraftSpec& spec,
                          const TripInstance& instance, const WeatherField& field, std::mt19937_64& rng,
                          const FeatureNormalization& norm = {});

/// Flattened transitions with GAE advantages and discounted returns.
struct TransitionBatch {
    Eigen::MatrixXd features;  // 5 x N
    Eigen::MatrixXd actions;   // 2 x N (pre-squash)
    Eigen::VectorXd old_log_probs;
    Eigen::VectorXd advantages;  // normalized when built with normalize = true
    Eigen::VectorXd returns;
    Eigen::VectorXd old_values;

    Eigen::Index size() const { return features.cols(); }
};

TransitionBatch make_batch(const std::vector<EpisodeRecord>& episodes, const TrainConfig& cfg, bool normalize = true);

/// Mean clipped surrogate objective, E[min(r A, clip(r, 1-eps, 1+eps) A)].
/// An infinite clip gives the unclipped surrogate E[r A].
double surrogate_objective(const PolicyParams& params, const TransitionBatch& batch, double clip);

struct UpdateStats {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
};

/// One PPO-clip update: `epochs_per_update` passes over shuffled minibatches
/// with Adam. Throws NonFiniteGradient (leaving `params` and `optimizer`
/// untouched) if a non-finite gradient appears.
std::pair<PolicyParams, UpdateStats> ppo_update(const PolicyParams& params, nn::Adam& optimizer,
                                                const std::vector<EpisodeRecord>& episodes, const TrainConfig& cfg,
                                                std::mt19937_64& rng);

struct TrainLogRow {
    long long update_index = 0;
    double mean_reward = 0.0;
    double mean_final_dist = 0.0;
    UpdateStats stats;
};

struct EpisodeSummary {
    double total_reward = 0.0;
    double final_distance = 0.0;
};

/// Everything needed to continue a run bit-for-bit.
struct TrainingState {
    PolicyParams params;
    nn::Adam optimizer;
    std::string rng_state;
    long long update_index = 0;
    long long instances_done = 0;
};

nlohmann::json training_state_json(const TrainingState& state);
TrainingState training_state_from_checkpoint(const PolicyCheckpoint& checkpoint);

struct TrainResult {
    TrainingState state;
    std::vector<TrainLogRow> log;
    std::vector<EpisodeSummary> episodes;
};

/// Produces the weather for a given instance index.
using FieldGenerator = std::function<std::shared_ptr<const WeatherField>(long long instance_index)>;

struct TrainHooks {
    std::function<void(const std::string&)> progress;      // line events
    std::function<void(const TrainLogRow&)> log_row;       // after every update
    std::function<void(const TrainingState&)> checkpoint;  // every cfg.checkpoint_every updates
};

/// Zero-wind ISA field covering the whole globe.
FieldGenerator uniform_field_generator(double wind_east_ms = 0.0, double wind_north_ms = 0.0,
                                       double temperature_k = 288.15);

/// Sample -> rollout -> update until cfg.instances episodes have been used.
/// Deterministic for a given config and seed. Passing `resume` continues a
/// previous run with its update indices.
TrainResult train(const TrainConfig& cfg, const AircraftSpec& spec, const FieldGenerator& fields,
                  const TrainHooks& hooks = {}, const TrainingState* resume = nullptr);

std::string format_log_header();
std::string format_log_row(const TrainLogRow& row);

}  // namespace hfp
