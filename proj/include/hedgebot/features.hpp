#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hedgebot/price_series.hpp"

namespace hedgebot {

// Day offsets at which past returns/vols are sampled into the state.
// Must be strictly monotone, nonnegative, and include 0.
class LagSet {
 public:
  LagSet() : LagSet({60, 20, 4, 3, 2, 1, 0}) {}
  explicit LagSet(std::vector<int> lags);

  const std::vector<int>& lags() const { return lags_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(lags_.size()); }
  int max_lag() const { return max_lag_; }
  int operator[](Eigen::Index i) const { return lags_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<int> lags_;
  int max_lag_ = 0;
};

// Augmented state O_t: per-strategy return and volatility layers over the
// asset lag grid, plus a context matrix over its own lag grid. The context
// block stacks the z-scored raw features and three derived rows: min and
// max strategy return, and max strategy volatility, at each lagged time.
struct Observation {
  Eigen::MatrixXd returns;  // m strategies x j lags
  Eigen::MatrixXd vols;     // m x j, per-day units
  Eigen::MatrixXd context;  // (p + 3) x j_c
};

// Train-window mean/std per raw context feature. A zero-std feature passes
// through centered but unscaled.
struct ContextStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stdev;
};

struct FeatureConfig {
  LagSet asset_lags;
  LagSet context_lags;
  int vol_window = 20;

  // Earliest t at which build_observation is defined. Both lag grids need
  // `vol_window` returns behind their oldest sample (the context block
  // carries a derived max-volatility row).
  int min_observation_index() const {
    return std::max(asset_lags.max_lag(), context_lags.max_lag()) + vol_window;
  }
};

// Simple return p_t / p_{t-1} - 1 for any column of the series.
double compute_returns(const PriceSeries& series, Eigen::Index column,
                       Eigen::Index t);

// Population standard deviation of the last `window` returns ending at t.
double rolling_vol(const PriceSeries& series, Eigen::Index column,
                   Eigen::Index t, int window);

ContextStats compute_context_stats(const PriceSeries& series,
                                   Eigen::Index train_begin,
                                   Eigen::Index train_end);

Observation build_observation(const PriceSeries& series, Eigen::Index t,
                              const FeatureConfig& config,
                              const ContextStats& stats);

}  // namespace hedgebot
