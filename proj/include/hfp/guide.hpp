#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hfp/geo.hpp"
#include "hfp/lattice.hpp"
#include "hfp/nn.hpp"
#include "hfp/weather.hpp"

namespace hfp {

inline constexpr int kFeatureDim = 5;
inline constexpr int kActionDim = 2;

/// Rotated displacement to destination (2) followed by the weather sample (3).
using FeatureVector = std::array<double, kFeatureDim>;
using Action = std::array<double, kActionDim>;

/// Scaling applied to the weather part of the features. Displacements are
/// scaled by the total trip length.
struct FeatureNormalization {
    double wind_scale_ms = 50.0;
    double temp_offset_k = 288.15;
    double temp_scale_k = 30.0;

    friend bool operator==(const FeatureNormalization&, const FeatureNormalization&) = default;
};

/// Separate actor and critic MLPs (5 -> 64 -> 64 -> heads, tanh) plus a
/// state-independent log standard deviation per action component.
/// All weights live in one flat vector: [actor | critic | log_std].
class PolicyParams {
public:
    PolicyParams(std::vector<int> hidden = {64, 64});

    /// Orthogonal init: actor output gain 0.01, critic output gain 1, log_std 0.
    static PolicyParams initialized(std::uint64_t seed, std::vector<int> hidden = {64, 64});
    /// Every weight and bias zero (log_std zero).
    static PolicyParams zeros(std::vector<int> hidden = {64, 64});

    const nn::MlpShape& actor_shape() const { return actor_; }
    const nn::MlpShape& critic_shape() const { return critic_; }
    const std::vector<int>& hidden() const { return hidden_; }

    Eigen::VectorXd& theta() { return theta_; }
    const Eigen::VectorXd& theta() const { return theta_; }

    const double* actor_data() const { return theta_.data(); }
    const double* critic_data() const { return theta_.data() + actor_offset_end(); }
    Eigen::Vector2d log_std() const { return theta_.tail<kActionDim>(); }

    std::ptrdiff_t actor_offset_end() const { return static_cast<std::ptrdiff_t>(actor_.param_count()); }
    std::ptrdiff_t critic_offset_end() const {
        return actor_offset_end() + static_cast<std::ptrdiff_t>(critic_.param_count());
    }

    /// Pre-squash action means for a batch of feature columns (5 x B -> 2 x B).
    Eigen::MatrixXd action_means(const Eigen::MatrixXd& features, nn::Tape* tape = nullptr) const;
    /// Value estimates (5 x B -> 1 x B).
    Eigen::MatrixXd values(const Eigen::MatrixXd& features, nn::Tape* tape = nullptr) const;
    double value(const FeatureVector& f) const;

    bool all_finite() const { return theta_.allFinite(); }

private:
    std::vector<int> hidden_;
    nn::MlpShape actor_;
    nn::MlpShape critic_;
    Eigen::VectorXd theta_;
};

enum class GuideKind { Policy, GreatCircle };

std::string to_string(GuideKind kind);
GuideKind guide_kind_from_string(const std::string& s);

struct GuideConfig {
    int waypoints = 5;  // n
    GuideKind kind = GuideKind::GreatCircle;
    FeatureNormalization normalization;
};

/// Features at `x` for a trip ending at `destination`. `trip_length_m`
/// normalizes the displacement part.
FeatureVector extract_features(const GeoPoint& x, const GeoPoint& destination, RotationAngle phi,
                               const WeatherField& field, double trip_length_m,
                               const FeatureNormalization& norm = {});

/// Pre-squash sample `raw`, its squashed action in [-1, 1]^2 and the log
/// density of `raw` under the policy's Gaussian.
struct ActionSample {
    Action raw{};
    Action action{};
    double log_prob = 0.0;
};

/// Deterministic when `rng` is null (tanh of the mean); otherwise samples a
/// Gaussian around the mean and squashes it.
ActionSample policy_action(const PolicyParams& params, const FeatureVector& features, std::mt19937_64* rng = nullptr);

/// Gaussian log density of `raw` given means and log standard deviations.
double gaussian_log_prob(const Action& raw, const Eigen::Vector2d& mean, const Eigen::Vector2d& log_std);

/// Movement length unit for a trip: great-circle trip length divided by n.
double step_scale(const GeoPoint& trip_origin, const GeoPoint& destination, int waypoints);

/// One guide step: the action, scaled by step_scale and rotated back to the
/// east/north frame, with its norm capped at step_scale.
GeoPoint guide_step(const GeoPoint& x_k, const GeoPoint& trip_origin, const GeoPoint& destination,
                    const Action& action, RotationAngle phi, int waypoints, double alt_delta_m = 0.0);

/// Coarse route with `config.waypoints` points. The great-circle guide spaces
/// them evenly on the track; the policy guide takes n-2 deterministic steps
/// and always ends at the destination. `altitude_deltas` gives the altitude
/// change per step (missing entries count as zero).
CoarseRoute roll_out(const GuideConfig& config, const PolicyParams* params, const GeoPoint& origin,
                     const GeoPoint& destination, const WeatherField& field,
                     std::span<const double> altitude_deltas = {});

/// Checkpoint file: versioned JSON with architecture, normalization and flat
/// weights. `extra` (optional) is stored under "training" and returned by load.
inline constexpr int kCheckpointSchemaVersion = 1;

struct PolicyCheckpoint {
    PolicyParams params;
    FeatureNormalization normalization;
    nlohmann::json training;  // null when absent
};

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params, const FeatureNormalization& norm,
                     const nlohmann::json& training = nullptr);
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json checkpoint_json(const PolicyParams& params, const FeatureNormalization& norm,
                               const nlohmann::json& training = nullptr);
PolicyCheckpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace hfp
