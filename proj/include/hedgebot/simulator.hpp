#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "hedgebot/price_series.hpp"
#include "hedgebot/rewards.hpp"

namespace hedgebot {

struct BacktestConfig {
  double commission = 0.0030;   // per unit turnover
  int action_lag = 1;           // days between deciding and earning
  double overlay_budget = 1.0;  // fraction of notional in the hedge overlay

  void validate() const;
};

// One evaluated day per row; values carries a leading 1.0 for the level
// before the first evaluated return.
struct BacktestResult {
  std::vector<Date> dates;          // size N
  Eigen::VectorXd values;           // size N + 1, values(0) == 1.0
  Eigen::MatrixXd weights_applied;  // N x l
  Eigen::VectorXd daily_returns;    // size N
  Eigen::VectorXd turnover;         // size N
  Eigen::VectorXd cost_paid;        // size N

  void write_csv(const std::filesystem::path& path) const;
};

// The decision made at series index t is applied to the return from
// t + action_lag to t + action_lag + 1, so evaluated days run from
// 1 + action_lag to T - 1. A decided row is either on the simplex
// (within 1e-9) or all zero (no overlay). Day one of the evaluated range
// establishes positions free of turnover; afterwards
// turnover_t = sum_i |w_applied(t) - w_applied(t-1)| and
// cost_t = commission * turnover_t, charged the day the weights apply.
BacktestResult run_backtest(const PriceSeries& series,
                            const Eigen::MatrixXd& decided_weights,
                            const BacktestConfig& config);

// Reverse pass through the same arithmetic: given dJ/d(daily_returns) on
// the evaluated days, the gradient with respect to every decided weight.
// Rows whose decision never applies get zero gradient.
Eigen::MatrixXd backtest_weight_gradient(const PriceSeries& series,
                                         const Eigen::MatrixXd& decided_weights,
                                         const BacktestConfig& config,
                                         const Eigen::VectorXd& dreturns);

EpisodeReturns episode_returns(const BacktestResult& result);

}  // namespace hedgebot
