#include "hedgebot/features.hpp"

#include <cmath>

#include "hedgebot/errors.hpp"

namespace hedgebot {

LagSet::LagSet(std::vector<int> lags) : lags_(std::move(lags)) {
  if (lags_.empty()) throw ValidationError("lag set is empty");
  bool has_zero = false;
  bool increasing = true, decreasing = true;
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    if (lags_[i] < 0) throw ValidationError("negative lag");
    if (lags_[i] == 0) has_zero = true;
    max_lag_ = std::max(max_lag_, lags_[i]);
    if (i > 0) {
      if (lags_[i] <= lags_[i - 1]) increasing = false;
      if (lags_[i] >= lags_[i - 1]) decreasing = false;
    }
  }
  if (!has_zero) throw ValidationError("lag set must contain 0");
  if (lags_.size() > 1 && !increasing && !decreasing) {
    throw ValidationError("lag set must be strictly monotone");
  }
}

double compute_returns(const PriceSeries& series, Eigen::Index column,
                       Eigen::Index t) {
  if (t < 1 || t >= series.size()) {
    throw ValidationError("return at t=" + std::to_string(t) +
                          " needs a prior level");
  }
  return series.level(t, column) / series.level(t - 1, column) - 1.0;
}

double rolling_vol(const PriceSeries& series, Eigen::Index column,
                   Eigen::Index t, int window) {
  if (window < 1) throw ValidationError("vol window must be >= 1");
  if (t < window || t >= series.size()) {
    throw ValidationError("vol at t=" + std::to_string(t) + " needs " +
                          std::to_string(window) + " prior returns");
  }
  double mean = 0.0;
  for (Eigen::Index u = t - window + 1; u <= t; ++u) {
    mean += compute_returns(series, column, u);
  }
  mean /= window;
  double accum = 0.0;
  for (Eigen::Index u = t - window + 1; u <= t; ++u) {
    const double dev = compute_returns(series, column, u) - mean;
    accum += dev * dev;
  }
  return std::sqrt(accum / window);
}

ContextStats compute_context_stats(const PriceSeries& series,
                                   Eigen::Index train_begin,
                                   Eigen::Index train_end) {
  if (train_begin < 0 || train_end >= series.size() || train_begin > train_end) {
    throw ValidationError("bad context-stats window");
  }
  const Eigen::Index p = series.num_context();
  ContextStats stats;
  stats.mean = Eigen::VectorXd::Zero(p);
  stats.stdev = Eigen::VectorXd::Zero(p);
  const Eigen::Index n = train_end - train_begin + 1;
  for (Eigen::Index i = 0; i < p; ++i) {
    double mean = 0.0;
    for (Eigen::Index t = train_begin; t <= train_end; ++t) {
      mean += series.context_level(t, i);
    }
    mean /= static_cast<double>(n);
    double accum = 0.0;
    for (Eigen::Index t = train_begin; t <= train_end; ++t) {
      const double dev = series.context_level(t, i) - mean;
      accum += dev * dev;
    }
    stats.mean(i) = mean;
    stats.stdev(i) = std::sqrt(accum / static_cast<double>(n));
  }
  return stats;
}

Observation build_observation(const PriceSeries& series, Eigen::Index t,
                              const FeatureConfig& config,
                              const ContextStats& stats) {
  const Eigen::Index m = series.num_strategies();
  const Eigen::Index p = series.num_context();
  if (stats.mean.size() != p) {
    throw ValidationError("context stats do not match the series");
  }
  const Eigen::Index j = config.asset_lags.size();
  const Eigen::Index jc = config.context_lags.size();
  if (t < config.min_observation_index() || t >= series.size()) {
    throw ValidationError("observation at t=" + std::to_string(t) +
                          " lacks history (needs t >= " +
                          std::to_string(config.min_observation_index()) + ")");
  }

  Observation obs;
  obs.returns.resize(m, j);
  obs.vols.resize(m, j);
  obs.context.resize(p + 3, jc);

  for (Eigen::Index a = 0; a < j; ++a) {
    const Eigen::Index u = t - config.asset_lags[a];
    for (Eigen::Index k = 0; k < m; ++k) {
      obs.returns(k, a) = compute_returns(series, series.strategy_column(k), u);
      obs.vols(k, a) = rolling_vol(series, series.strategy_column(k), u,
                                   config.vol_window);
    }
  }

  for (Eigen::Index a = 0; a < jc; ++a) {
    const Eigen::Index u = t - config.context_lags[a];
    for (Eigen::Index i = 0; i < p; ++i) {
      const double centered = series.context_level(u, i) - stats.mean(i);
      const double scale = stats.stdev(i) > 0.0 ? stats.stdev(i) : 1.0;
      obs.context(i, a) = centered / scale;
    }
    double min_ret = 0.0, max_ret = 0.0, max_vol = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double r = compute_returns(series, series.strategy_column(k), u);
      const double v = rolling_vol(series, series.strategy_column(k), u,
                                   config.vol_window);
      if (k == 0 || r < min_ret) min_ret = r;
      if (k == 0 || r > max_ret) max_ret = r;
      if (k == 0 || v > max_vol) max_vol = v;
    }
    obs.context(p + 0, a) = min_ret;
    obs.context(p + 1, a) = max_ret;
    obs.context(p + 2, a) = max_vol;
  }
  return obs;
}

}  // namespace hedgebot
