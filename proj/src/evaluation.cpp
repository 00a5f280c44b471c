#include "hedgebot/evaluation.hpp"

#include <cmath>

#include "hedgebot/errors.hpp"

namespace hedgebot {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

Eigen::VectorXd daily_returns_of(const Eigen::VectorXd& values) {
  Eigen::VectorXd r(values.size() - 1);
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i) {
    r(i) = values(i + 1) / values(i) - 1.0;
  }
  return r;
}

void check_positive(const Eigen::VectorXd& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values(i) > 0.0)) {
      throw ValidationError("value path must be strictly positive");
    }
  }
}

}  // namespace

double annualized_return(const Eigen::VectorXd& values) {
  if (values.size() < 2) throw ValidationError("need at least two values");
  check_positive(values);
  const double tau =
      static_cast<double>(values.size() - 1) / kTradingDaysPerYear;
  return std::pow(values(values.size() - 1) / values(0), 1.0 / tau) - 1.0;
}

double sharpe(const Eigen::VectorXd& values) {
  if (values.size() < 3) throw ValidationError("need at least three values");
  check_positive(values);
  const double mu = annualized_return(values);
  const Eigen::VectorXd r = daily_returns_of(values);
  const double mean = r.mean();
  const double var = (r.array() - mean).square().sum() / static_cast<double>(r.size());
  const double sigma = std::sqrt(kTradingDaysPerYear) * std::sqrt(var);
  if (sigma == 0.0) return mu == 0.0 ? 0.0 : sign_of(mu) * kRatioCap;
  return mu / sigma;
}

double max_drawdown(const Eigen::VectorXd& values) {
  if (values.size() == 0) throw ValidationError("empty value path");
  check_positive(values);
  double running_max = values(0);
  double worst = 0.0;
  for (Eigen::Index t = 0; t < values.size(); ++t) {
    if (values(t) > running_max) running_max = values(t);
    const double dd = 1.0 - values(t) / running_max;
    if (dd > worst) worst = dd;
  }
  return worst;
}

MetricsReport compute_metrics(const Eigen::VectorXd& values) {
  MetricsReport report;
  report.annualized_return = annualized_return(values);
  report.sharpe = sharpe(values);
  report.sortino = sortino(EpisodeReturns::from_daily(daily_returns_of(values)));
  report.max_drawdown = max_drawdown(values);
  return report;
}

MetricsReport trailing_metrics(const Eigen::VectorXd& values,
                               Eigen::Index trailing_days) {
  if (trailing_days < 2) throw ValidationError("trailing window too short");
  const Eigen::VectorXd r = daily_returns_of(values);
  const Eigen::Index n = std::min<Eigen::Index>(trailing_days, r.size());
  Eigen::VectorXd path(n + 1);
  path(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    path(i + 1) = path(i) * (1.0 + r(r.size() - n + i));
  }
  return compute_metrics(path);
}

WalkForwardSchedule build_schedule(const PriceSeries& series, ScheduleMode mode,
                                   Date first_train_end, int test_span_days) {
  if (test_span_days < 1) throw ValidationError("test span must be >= 1 day");
  const Eigen::Index anchor = series.last_on_or_before(first_train_end);
  if (anchor < 0) {
    throw ValidationError("first train end predates the series");
  }

  WalkForwardSchedule schedule;
  schedule.mode = mode;
  const Eigen::Index first_train_len = anchor + 1;
  const Date last_date = series.date(series.size() - 1);

  for (int k = 0;; ++k) {
    const Date lower = first_train_end + std::chrono::days{k * test_span_days};
    const Date upper =
        first_train_end + std::chrono::days{(k + 1) * test_span_days};
    if (lower >= last_date) break;
    const Eigen::Index begin = series.lower_bound(lower + std::chrono::days{1});
    const Eigen::Index end = series.last_on_or_before(upper);
    if (begin >= series.size()) break;
    if (end < begin) continue;  // no trading day in this calendar block

    WalkForwardStep step;
    step.test_begin = begin;
    step.test_end = end;
    step.train_end = begin - 1;
    if (step.train_end < 0) {
      throw ValidationError("no training data before the first test block");
    }
    step.train_begin = mode == ScheduleMode::kExtending
                           ? 0
                           : std::max<Eigen::Index>(
                                 0, step.train_end - first_train_len + 1);
    schedule.steps.push_back(step);
  }
  if (schedule.steps.empty()) {
    throw ValidationError("schedule is empty: no dates after the first train end");
  }
  return schedule;
}

WalkForwardSchedule build_kfold_schedule(const PriceSeries& series, int folds) {
  if (folds < 2) throw ValidationError("k-fold needs k >= 2");
  const Eigen::Index T = series.size();
  if (T < folds) throw ValidationError("more folds than data points");
  WalkForwardSchedule schedule;
  schedule.mode = ScheduleMode::kExtending;
  for (int k = 0; k < folds; ++k) {
    WalkForwardStep step;
    step.test_begin = T * k / folds;
    step.test_end = T * (k + 1) / folds - 1;
    // Training spans the whole sample; the chronology of train vs test is
    // deliberately broken, which is the point of keeping this generator
    // around for comparison.
    step.train_begin = 0;
    step.train_end = T - 1;
    schedule.steps.push_back(step);
  }
  return schedule;
}

WalkForwardRun run_walk_forward(const PriceSeries& series,
                                const WalkForwardSchedule& schedule,
                                AllocationModel& model,
                                const BacktestConfig& backtest_config) {
  backtest_config.validate();
  if (schedule.steps.empty()) throw ValidationError("empty schedule");
  const Eigen::Index lag = backtest_config.action_lag;

  WalkForwardRun run;
  std::vector<double> concat_returns;

  for (const WalkForwardStep& step : schedule.steps) {
    if (step.test_begin <= step.train_end) {
      throw ValidationError("test range must follow its train range");
    }
    const PriceSeries train_view = series.slice(step.train_begin, step.train_end);
    model.fit(train_view);

    const Eigen::Index d_begin = step.test_begin - 1 - lag;
    const Eigen::Index d_end = step.test_end - 1 - lag;
    if (d_begin < 1) {
      throw ValidationError("not enough history before the first test day");
    }
    const PriceSeries decide_view = series.slice(0, step.test_end);
    const Eigen::MatrixXd weights = model.decide(decide_view, d_begin, d_end);
    if (weights.rows() != d_end - d_begin + 1 ||
        weights.cols() != series.num_strategies()) {
      throw ValidationError("model returned a misshapen weight path");
    }

    const PriceSeries sub = series.slice(d_begin, step.test_end);
    Eigen::MatrixXd decided(sub.size(), series.num_strategies());
    decided.topRows(weights.rows()) = weights;
    for (Eigen::Index r = weights.rows(); r < decided.rows(); ++r) {
      decided.row(r) = weights.row(weights.rows() - 1);
    }

    WalkForwardStepResult step_result;
    step_result.backtest = run_backtest(sub, decided, backtest_config);
    step_result.metrics = compute_metrics(step_result.backtest.values);
    for (Eigen::Index i = 0; i < step_result.backtest.daily_returns.size(); ++i) {
      concat_returns.push_back(step_result.backtest.daily_returns(i));
      run.dates.push_back(step_result.backtest.dates[static_cast<std::size_t>(i)]);
    }
    run.steps.push_back(std::move(step_result));
  }

  const auto n = static_cast<Eigen::Index>(concat_returns.size());
  run.values.resize(n + 1);
  run.daily_returns.resize(n);
  run.values(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    run.daily_returns(i) = concat_returns[static_cast<std::size_t>(i)];
    run.values(i + 1) = run.values(i) * (1.0 + concat_returns[static_cast<std::size_t>(i)]);
  }
  run.overall = compute_metrics(run.values);
  return run;
}

}  // namespace hedgebot
