#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "hedgebot/simulator.hpp"

namespace hedgebot {

struct MetricsReport {
  double annualized_return = 0.0;
  double sharpe = 0.0;
  double sortino = 0.0;
  double max_drawdown = 0.0;
};

// mu = (P_T / P_0)^(1/tau) - 1 with tau = daily-return count / 250.
double annualized_return(const Eigen::VectorXd& values);

// mu over sqrt(250) x population std of daily returns; 0 when both the
// return and the volatility vanish, +/-1e6 on zero volatility otherwise.
double sharpe(const Eigen::VectorXd& values);

// Largest peak-to-trough fractional decline.
double max_drawdown(const Eigen::VectorXd& values);

// All four metrics of a value path (Sortino via the rewards module).
MetricsReport compute_metrics(const Eigen::VectorXd& values);

// Metrics over the last `trailing_days` daily returns of the path.
MetricsReport trailing_metrics(const Eigen::VectorXd& values,
                               Eigen::Index trailing_days);

enum class ScheduleMode { kExtending, kSliding };

struct WalkForwardStep {
  Eigen::Index train_begin = 0;
  Eigen::Index train_end = 0;
  Eigen::Index test_begin = 0;
  Eigen::Index test_end = 0;
};

struct WalkForwardSchedule {
  ScheduleMode mode = ScheduleMode::kExtending;
  std::vector<WalkForwardStep> steps;
};

// Consecutive test blocks of `test_span_days` calendar days after
// first_train_end (final block may be short). Extending mode anchors
// train_begin at the series start; sliding mode keeps the first step's
// train length.
WalkForwardSchedule build_schedule(const PriceSeries& series, ScheduleMode mode,
                                   Date first_train_end, int test_span_days);

// Chronology-breaking k-fold splitter, kept for contrast with the
// walk-forward schedules; never used by the experiment runner.
WalkForwardSchedule build_kfold_schedule(const PriceSeries& series, int folds);

// Uniform fit/decide surface for the trained agent and every baseline.
class AllocationModel {
 public:
  virtual ~AllocationModel() = default;
  virtual std::string name() const = 0;

  // `train_view` is the series truncated at the step's train_end; test data
  // cannot reach fitting by construction.
  virtual void fit(const PriceSeries& train_view) = 0;

  // Decided weights for decision indices [begin, end] of `series` (one row
  // per decision day). Decisions may only read data at or before their day.
  virtual Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                                 Eigen::Index end) = 0;
};

struct WalkForwardStepResult {
  BacktestResult backtest;
  MetricsReport metrics;
};

struct WalkForwardRun {
  std::vector<WalkForwardStepResult> steps;
  std::vector<Date> dates;        // concatenated out-of-sample days
  Eigen::VectorXd values;         // size dates.size() + 1, starts at 1.0
  Eigen::VectorXd daily_returns;  // concatenated
  MetricsReport overall;
};

// Per step: fit on the truncated train view, decide over the test range,
// backtest, and stitch the out-of-sample path together.
WalkForwardRun run_walk_forward(const PriceSeries& series,
                                const WalkForwardSchedule& schedule,
                                AllocationModel& model,
                                const BacktestConfig& backtest_config);

}  // namespace hedgebot
