#include "hedgebot/trainer.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "hedgebot/errors.hpp"
#include "hedgebot/io_util.hpp"

namespace hedgebot {

namespace {

void add_noise(Eigen::MatrixXd& m, std::mt19937_64& rng, double std_dev) {
  std::normal_distribution<double> normal(0.0, std_dev);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += normal(rng);
}

Eigen::VectorXd random_simplex(Eigen::Index l, std::mt19937_64& rng) {
  // Dirichlet(1,...,1): normalized unit exponentials.
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(l);
  for (Eigen::Index i = 0; i < l; ++i) w(i) = expo(rng);
  return w / w.sum();
}

// Slice covering an episode's applied days plus the weight rows feeding it.
// Decision i of the buffer lands on row i of the slice-aligned matrix.
struct EpisodeFrame {
  PriceSeries sub;
  Eigen::MatrixXd decided;
};

EpisodeFrame episode_frame(const ReplayBuffer& buffer, const PriceSeries& series,
                           const BacktestConfig& backtest) {
  const Eigen::Index K = buffer.size();
  if (K == 0) throw ValidationError("empty replay buffer");
  const Eigen::Index first = buffer.first_decision;
  const Eigen::Index last_row = first + K + backtest.action_lag;
  if (last_row >= series.size()) {
    throw ValidationError("episode extends past the end of the series");
  }
  EpisodeFrame frame{series.slice(first, last_row),
                     Eigen::MatrixXd(K + 1 + backtest.action_lag,
                                     series.num_strategies())};
  for (Eigen::Index i = 0; i < K; ++i) {
    frame.decided.row(i) = buffer.steps[static_cast<std::size_t>(i)].action;
  }
  // Trailing rows decide for days beyond the episode; they are never
  // evaluated but must pass the simplex check.
  for (Eigen::Index i = K; i < frame.decided.rows(); ++i) {
    frame.decided.row(i) = frame.decided.row(K - 1);
  }
  return frame;
}

ReplayBuffer run_rollout(const Policy& policy, const PolicyParams& params,
                         const PriceSeries& series, IndexRange decisions,
                         const FeatureConfig& features, const ContextStats& stats,
                         const TrainConfig* config, std::mt19937_64* rng) {
  if (decisions.begin > decisions.end) {
    throw ValidationError("empty decision range");
  }
  ReplayBuffer buffer;
  buffer.reset(decisions.begin);
  Observation obs = build_observation(series, decisions.begin, features, stats);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Eigen::Index t = decisions.begin; t <= decisions.end; ++t) {
    bool use_policy = true;
    if (config && rng) use_policy = uniform(*rng) < config->explore_prob;
    Eigen::VectorXd action =
        use_policy ? policy.forward(params, obs)
                   : random_simplex(policy.config().num_strategies, *rng);
    Observation next = build_observation(series, t + 1, features, stats);
    if (config && rng && config->noise_std > 0.0) {
      add_noise(next.returns, *rng, config->noise_std);
      add_noise(next.vols, *rng, config->noise_std);
      add_noise(next.context, *rng, config->noise_std);
    }
    buffer.steps.push_back({std::move(obs), std::move(action), next, use_policy});
    obs = std::move(next);
  }
  return buffer;
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ValidationError("learning rate must be > 0");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (episode_days < 0) throw ValidationError("episode days must be >= 0");
  if (l2_coeff < 0.0) throw ValidationError("l2 coefficient must be >= 0");
  if (noise_std < 0.0) throw ValidationError("noise std must be >= 0");
  if (explore_prob < 0.0 || explore_prob > 1.0) {
    throw ValidationError("explore probability must be in [0, 1]");
  }
  if (max_iterations < 1) throw ValidationError("max iterations must be >= 1");
  if (early_stop_patience < 1) throw ValidationError("patience must be >= 1");
}

AdamState AdamState::zero(Eigen::Index size) {
  AdamState s;
  s.first_moment = Eigen::VectorXd::Zero(size);
  s.second_moment = Eigen::VectorXd::Zero(size);
  return s;
}

void adam_step(PolicyParams& params, const Eigen::VectorXd& gradient,
               AdamState& state, double learning_rate) {
  if (gradient.size() != params.values.size() ||
      state.first_moment.size() != gradient.size()) {
    throw ValidationError("adam: shape mismatch");
  }
  for (Eigen::Index i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient(i))) {
      std::string layer = "<unknown>";
      for (const ParamBlock& b : params.layout) {
        if (i >= b.offset && i < b.offset + b.size()) {
          layer = b.name;
          break;
        }
      }
      throw StateError("non-finite gradient entry in layer " + layer);
    }
  }
  ++state.step;
  state.first_moment =
      state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient;
  state.second_moment = state.beta2 * state.second_moment +
                        (1.0 - state.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const Eigen::ArrayXd m_hat = state.first_moment.array() / c1;
  const Eigen::ArrayXd v_hat = state.second_moment.array() / c2;
  // Ascent direction.
  params.values.array() +=
      learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
  for (Eigen::Index i = 0; i < params.values.size(); ++i) {
    if (!std::isfinite(params.values(i))) {
      throw StateError("non-finite parameter after adam step");
    }
  }
}

IndexRange decision_range(const PriceSeries& series, IndexRange window,
                          const FeatureConfig& features,
                          const BacktestConfig& backtest) {
  if (window.begin < 0 || window.end >= series.size() ||
      window.begin > window.end) {
    throw ValidationError("bad train window");
  }
  IndexRange d;
  d.begin = std::max<Eigen::Index>(window.begin,
                                   features.min_observation_index());
  d.end = window.end - 1 - backtest.action_lag;
  if (d.begin > d.end) {
    throw ValidationError("window too short for the lag grid and vol window");
  }
  return d;
}

ReplayBuffer rollout_episode(const Policy& policy, const PolicyParams& params,
                             const PriceSeries& series, IndexRange decisions,
                             const FeatureConfig& features,
                             const ContextStats& stats,
                             const TrainConfig& config, std::mt19937_64& rng) {
  return run_rollout(policy, params, series, decisions, features, stats,
                     &config, &rng);
}

ReplayBuffer deterministic_rollout(const Policy& policy,
                                   const PolicyParams& params,
                                   const PriceSeries& series,
                                   IndexRange decisions,
                                   const FeatureConfig& features,
                                   const ContextStats& stats) {
  return run_rollout(policy, params, series, decisions, features, stats,
                     nullptr, nullptr);
}

double episode_reward(const ReplayBuffer& buffer, const PriceSeries& series,
                      const BacktestConfig& backtest, RewardKind kind) {
  const EpisodeFrame frame = episode_frame(buffer, series, backtest);
  const BacktestResult result = run_backtest(frame.sub, frame.decided, backtest);
  return reward(episode_returns(result), kind);
}

Eigen::VectorXd compute_episode_gradient(const Policy& policy,
                                         const PolicyParams& params,
                                         const ReplayBuffer& buffer,
                                         const PriceSeries& series,
                                         const BacktestConfig& backtest,
                                         const TrainConfig& config) {
  const EpisodeFrame frame = episode_frame(buffer, series, backtest);
  const BacktestResult result = run_backtest(frame.sub, frame.decided, backtest);
  const EpisodeReturns ep = episode_returns(result);
  const Eigen::VectorXd dreward = reward_gradient(ep, config.reward_kind);
  const Eigen::MatrixXd dweights =
      backtest_weight_gradient(frame.sub, frame.decided, backtest, dreward);

  std::vector<ForwardCache> caches;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < buffer.size(); ++i) {
    const ReplayStep& step = buffer.steps[static_cast<std::size_t>(i)];
    if (!step.policy_action) continue;  // random actions are constants
    caches.push_back(policy.forward_cached(params, step.observation));
    rows.push_back(i);
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.num_params());
  if (!caches.empty()) {
    Eigen::MatrixXd d_out(static_cast<Eigen::Index>(caches.size()),
                          policy.config().num_strategies);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      d_out.row(static_cast<Eigen::Index>(i)) = dweights.row(rows[i]);
    }
    grad = policy.backward(params, caches, d_out);
  }
  grad -= 2.0 * config.l2_coeff * params.values;
  return grad;
}

TrainResult train(const Policy& policy, const PriceSeries& series,
                  IndexRange train_window, const FeatureConfig& features,
                  const BacktestConfig& backtest, const TrainConfig& config) {
  config.validate();
  const ContextStats stats =
      compute_context_stats(series, train_window.begin, train_window.end);
  const IndexRange full = decision_range(series, train_window, features, backtest);

  TrainResult result;
  result.params = policy.init_params(config.seed);
  PolicyParams best_params = result.params;
  AdamState adam = AdamState::zero(policy.num_params());
  std::mt19937_64 rng(config.seed);

  double best = -std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.num_params());
    int episodes = 1;
    if (config.episode_days > 0 && config.episode_days < full.length()) {
      episodes = config.batch_size;
      std::uniform_int_distribution<Eigen::Index> start_dist(
          full.begin, full.end - config.episode_days + 1);
      for (int e = 0; e < episodes; ++e) {
        const Eigen::Index start = start_dist(rng);
        const IndexRange window{start, start + config.episode_days - 1};
        const ReplayBuffer buffer = rollout_episode(
            policy, result.params, series, window, features, stats, config, rng);
        grad += compute_episode_gradient(policy, result.params, buffer, series,
                                         backtest, config);
      }
    } else {
      const ReplayBuffer buffer = rollout_episode(
          policy, result.params, series, full, features, stats, config, rng);
      grad = compute_episode_gradient(policy, result.params, buffer, series,
                                      backtest, config);
    }
    grad /= static_cast<double>(episodes);
    adam_step(result.params, grad, adam, config.learning_rate);

    const ReplayBuffer det = deterministic_rollout(policy, result.params, series,
                                                   full, features, stats);
    const double train_reward =
        episode_reward(det, series, backtest, config.reward_kind);
    result.iterations_run = iter + 1;
    if (train_reward > best) {
      best = train_reward;
      best_params = result.params;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    result.curve.train_reward.push_back(train_reward);
    result.curve.best_reward.push_back(best);
    if (since_improvement >= config.early_stop_patience) break;
  }
  result.best_train_reward = best;
  result.params = std::move(best_params);
  return result;
}

void TrainProgress::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "iteration,train_reward,best_reward\n";
  for (std::size_t i = 0; i < train_reward.size(); ++i) {
    out << (i + 1) << ',' << format_double(train_reward[i]) << ','
        << format_double(best_reward[i]) << '\n';
  }
}

}  // namespace hedgebot
