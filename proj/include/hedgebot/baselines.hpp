#pragma once

#include <Eigen/Dense>

#include "hedgebot/evaluation.hpp"
#include "hedgebot/price_series.hpp"

namespace hedgebot {

struct MarkowitzConfig {
  int lookback = 250;          // days behind each estimate
  int rebalance_period = 126;  // decision days between re-solves

  void validate() const;
};

// argmin w' Sigma w  s.t.  sum w = 1, w >= 0, mu' w >= floor.
// Solved exactly by enumerating active sets (l is small); Sigma gets a
// 1e-8 diagonal ridge. Falls back to the max-return vertex when the floor
// is unattainable.
Eigen::VectorXd min_variance_qp(const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& sigma, double floor);

// Piecewise-constant weight paths over decision days [begin, end]; every
// estimate uses data at or before its decision day only.
Eigen::MatrixXd markowitz_decide(const PriceSeries& series, Eigen::Index begin,
                                 Eigen::Index end, const MarkowitzConfig& config);
Eigen::MatrixXd follow_winner(const PriceSeries& series, Eigen::Index begin,
                              Eigen::Index end, int lookback,
                              int rebalance_period);
Eigen::MatrixXd follow_loser(const PriceSeries& series, Eigen::Index begin,
                             Eigen::Index end, int lookback,
                             int rebalance_period);
// Zero overlay rows: the simulator carries the risky asset alone.
Eigen::MatrixXd risky_only(Eigen::Index strategies, Eigen::Index days);

class RiskyOnlyModel : public AllocationModel {
 public:
  std::string name() const override { return "risky"; }
  void fit(const PriceSeries&) override {}
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    return risky_only(series.num_strategies(), end - begin + 1);
  }
};

class UniformModel : public AllocationModel {
 public:
  std::string name() const override { return "uniform"; }
  void fit(const PriceSeries&) override {}
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    const Eigen::Index l = series.num_strategies();
    return Eigen::MatrixXd::Constant(end - begin + 1, l, 1.0 / double(l));
  }
};

class MarkowitzModel : public AllocationModel {
 public:
  explicit MarkowitzModel(MarkowitzConfig config = {}) : config_(config) {}
  std::string name() const override { return "markowitz"; }
  void fit(const PriceSeries&) override {}
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    return markowitz_decide(series, begin, end, config_);
  }

 private:
  MarkowitzConfig config_;
};

class FollowWinnerModel : public AllocationModel {
 public:
  FollowWinnerModel(int lookback = 250, int rebalance_period = 126)
      : lookback_(lookback), rebalance_(rebalance_period) {}
  std::string name() const override { return "winner"; }
  void fit(const PriceSeries&) override {}
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    return follow_winner(series, begin, end, lookback_, rebalance_);
  }

 private:
  int lookback_;
  int rebalance_;
};

class FollowLoserModel : public AllocationModel {
 public:
  FollowLoserModel(int lookback = 250, int rebalance_period = 126)
      : lookback_(lookback), rebalance_(rebalance_period) {}
  std::string name() const override { return "loser"; }
  void fit(const PriceSeries&) override {}
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    return follow_loser(series, begin, end, lookback_, rebalance_);
  }

 private:
  int lookback_;
  int rebalance_;
};

}  // namespace hedgebot
