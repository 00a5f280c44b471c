#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "hedgebot/policy.hpp"
#include "hedgebot/rewards.hpp"
#include "hedgebot/simulator.hpp"

namespace hedgebot {

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 50;        // episode windows averaged per iteration
  int episode_days = 0;       // 0 = one episode spanning the train window
  double l2_coeff = 1e-8;
  double noise_std = 0.002;   // adversarial Gaussian std on stored observations
  double explore_prob = 0.9;  // policy action with probability p, random else
  int max_iterations = 500;
  int early_stop_patience = 50;
  RewardKind reward_kind = RewardKind::kNetProfit;
  std::uint64_t seed = 12345;

  void validate() const;
};

// One episode step. `policy_action` marks actions produced by the network;
// random exploration actions are constants for the gradient.
struct ReplayStep {
  Observation observation;
  Eigen::VectorXd action;
  Observation next_observation;
  bool policy_action = true;
};

// Chronological steps of the current episode; reset at episode start.
struct ReplayBuffer {
  std::vector<ReplayStep> steps;
  Eigen::Index first_decision = 0;  // series index of steps[0]

  void reset(Eigen::Index first) {
    steps.clear();
    first_decision = first;
  }
  Eigen::Index size() const { return static_cast<Eigen::Index>(steps.size()); }
};

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zero(Eigen::Index size);
};

// Bias-corrected Adam update in the ascent direction. Throws on any
// non-finite gradient entry, naming the offending layer.
void adam_step(PolicyParams& params, const Eigen::VectorXd& gradient,
               AdamState& state, double learning_rate);

// Inclusive series-index range.
struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index length() const { return end - begin + 1; }
};

struct TrainProgress {
  std::vector<double> train_reward;  // per iteration
  std::vector<double> best_reward;

  void write_csv(const std::filesystem::path& path) const;
};

struct TrainResult {
  PolicyParams params;
  TrainProgress curve;
  double best_train_reward = 0.0;
  int iterations_run = 0;
};

// Decision days feeding evaluated returns inside `window`, clipped to where
// observations exist.
IndexRange decision_range(const PriceSeries& series, IndexRange window,
                          const FeatureConfig& features,
                          const BacktestConfig& backtest);

// One episode: observe, act (policy with probability p, random simplex
// point otherwise), perturb the stored next observation with Gaussian
// noise. Chronological; deterministic for a fixed rng state.
ReplayBuffer rollout_episode(const Policy& policy, const PolicyParams& params,
                             const PriceSeries& series, IndexRange decisions,
                             const FeatureConfig& features,
                             const ContextStats& stats,
                             const TrainConfig& config, std::mt19937_64& rng);

// Noise-free, exploration-free rollout used for reward tracking and for the
// no-randomness training path.
ReplayBuffer deterministic_rollout(const Policy& policy,
                                   const PolicyParams& params,
                                   const PriceSeries& series,
                                   IndexRange decisions,
                                   const FeatureConfig& features,
                                   const ContextStats& stats);

// Episode reward (minus L2 penalty) differentiated through the simulator
// and the policy at the stored observations.
Eigen::VectorXd compute_episode_gradient(const Policy& policy,
                                         const PolicyParams& params,
                                         const ReplayBuffer& buffer,
                                         const PriceSeries& series,
                                         const BacktestConfig& backtest,
                                         const TrainConfig& config);

// Episode reward of a buffer's actions (no L2 term).
double episode_reward(const ReplayBuffer& buffer, const PriceSeries& series,
                      const BacktestConfig& backtest, RewardKind kind);

// Full loop: rollout, gradient, Adam ascent, early stopping on the
// deterministic train-window reward. Returns the best parameters seen.
TrainResult train(const Policy& policy, const PriceSeries& series,
                  IndexRange train_window, const FeatureConfig& features,
                  const BacktestConfig& backtest, const TrainConfig& config);

}  // namespace hedgebot
