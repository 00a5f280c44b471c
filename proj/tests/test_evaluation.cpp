#include <doctest.h>

#include <cmath>
#include <random>

#include "hedgebot/baselines.hpp"
#include "hedgebot/errors.hpp"
#include "hedgebot/evaluation.hpp"
#include "test_support.hpp"

using namespace hedgebot;

namespace {

// O(T^2) drawdown oracle: max over all (peak, trough) pairs.
double brute_force_drawdown(const Eigen::VectorXd& values) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < values.size(); ++s) {
    for (Eigen::Index t = s; t < values.size(); ++t) {
      worst = std::max(worst, 1.0 - values(t) / values(s));
    }
  }
  return worst;
}

Eigen::VectorXd to_vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

PriceSeries long_calendar_series(Eigen::Index strategies = 2) {
  // weekday calendar spanning 2000-01-03 .. 2020-06-19, mild drift
  const Date start = parse_date("2000-01-03");
  const Date last = parse_date("2020-06-19");
  std::vector<Date> dates;
  for (Date d = start; d <= last; d += std::chrono::days{1}) {
    if (!is_weekend(d)) dates.push_back(d);
  }
  const auto T = static_cast<Eigen::Index>(dates.size());
  std::vector<std::string> names = {"risky"};
  for (Eigen::Index k = 0; k < strategies; ++k) {
    names.push_back("strat_" + std::to_string(k + 1));
  }
  names.push_back("ctx_1");
  Eigen::MatrixXd values(T, 2 + strategies);
  std::mt19937_64 rng(2020);
  std::normal_distribution<double> shock(0.0002, 0.01);
  values.row(0).setConstant(100.0);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index c = 0; c < 1 + strategies; ++c) {
      values(t, c) = values(t - 1, c) * (1.0 + shock(rng));
    }
    values(t, 1 + strategies) = shock(rng);
  }
  values.col(1 + strategies).array() = values.col(0).array().log();
  return PriceSeries(dates, names, values, strategies, 1);
}

}  // namespace

TEST_CASE("annualized return follows the 250-day power formula") {
  // doubling over exactly 250 trading days
  Eigen::VectorXd doubling(251);
  for (Eigen::Index i = 0; i <= 250; ++i) {
    doubling(i) = std::pow(2.0, static_cast<double>(i) / 250.0);
  }
  CHECK(annualized_return(doubling) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd flat = Eigen::VectorXd::Ones(100);
  CHECK(annualized_return(flat) == 0.0);

  // P_T / P_0 = 1.21 over 500 trading days: sqrt(1.21) - 1
  Eigen::VectorXd up(501);
  for (Eigen::Index i = 0; i <= 500; ++i) {
    up(i) = std::pow(1.21, static_cast<double>(i) / 500.0);
  }
  CHECK(annualized_return(up) == doctest::Approx(0.10).epsilon(1e-12));

  CHECK_THROWS_AS(annualized_return(to_vec({1.0})), ValidationError);
  CHECK_THROWS_AS(annualized_return(to_vec({1.0, -1.0})), ValidationError);
}

TEST_CASE("sharpe on a constructed path with known return and volatility") {
  // alternating +/-d around drift x: pop std is exactly d
  const double target_vol = 0.20;
  const double d = target_vol / std::sqrt(250.0);
  const double pair_growth = std::pow(1.10, 2.0 / 250.0);
  const double x = std::sqrt(pair_growth + d * d) - 1.0;
  Eigen::VectorXd values(251);
  values(0) = 1.0;
  for (Eigen::Index i = 0; i < 250; ++i) {
    const double r = (i % 2 == 0) ? x + d : x - d;
    values(i + 1) = values(i) * (1.0 + r);
  }
  CHECK(annualized_return(values) == doctest::Approx(0.10).epsilon(1e-10));
  CHECK(sharpe(values) == doctest::Approx(0.5).epsilon(1e-9));

  // doubling the volatility at the same return halves the ratio
  const double d2 = 2.0 * d;
  const double x2 = std::sqrt(pair_growth + d2 * d2) - 1.0;
  Eigen::VectorXd wide(251);
  wide(0) = 1.0;
  for (Eigen::Index i = 0; i < 250; ++i) {
    const double r = (i % 2 == 0) ? x2 + d2 : x2 - d2;
    wide(i + 1) = wide(i) * (1.0 + r);
  }
  CHECK(sharpe(wide) == doctest::Approx(0.25).epsilon(1e-9));

  // flat path: zero return over zero volatility reads as zero
  Eigen::VectorXd flat = Eigen::VectorXd::Ones(10);
  CHECK(sharpe(flat) == 0.0);
}

TEST_CASE("max drawdown matches hand-traced paths and the brute force") {
  CHECK(max_drawdown(to_vec({1.0, 1.1, 1.2})) == 0.0);
  CHECK(max_drawdown(to_vec({100, 80, 90})) ==
        doctest::Approx(0.20).epsilon(1e-14));
  CHECK(max_drawdown(to_vec({100, 120, 60, 130})) ==
        doctest::Approx(0.50).epsilon(1e-14));

  std::mt19937_64 rng(55);
  std::lognormal_distribution<double> step(0.0, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<Eigen::Index> len(2, 200);
    Eigen::VectorXd values(len(rng));
    values(0) = 1.0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
      values(i) = values(i - 1) * step(rng);
    }
    CHECK(max_drawdown(values) == brute_force_drawdown(values));
  }
}

TEST_CASE("extending schedule covers 2007-2020 in fourteen yearly steps") {
  const PriceSeries series = long_calendar_series();
  const WalkForwardSchedule schedule = build_schedule(
      series, ScheduleMode::kExtending, parse_date("2006-12-31"), 365);
  CHECK(schedule.steps.size() == 14);

  const Eigen::Index anchor = series.last_on_or_before(parse_date("2006-12-31"));
  Eigen::Index expect = anchor + 1;
  for (const WalkForwardStep& step : schedule.steps) {
    CHECK(step.train_begin == 0);  // extending anchors the train start
    CHECK(step.train_end == step.test_begin - 1);
    CHECK(step.test_begin == expect);  // contiguous, disjoint coverage
    expect = step.test_end + 1;
  }
  CHECK(expect == series.size());  // all dates after the anchor are covered

  // first test block is calendar 2007
  const auto& first = schedule.steps.front();
  CHECK(format_date(series.date(first.test_begin)).substr(0, 4) == "2007");
  CHECK(format_date(series.date(first.test_end)).substr(0, 4) == "2007");
}

TEST_CASE("sliding schedule keeps the train length fixed") {
  const PriceSeries series = long_calendar_series();
  const WalkForwardSchedule schedule = build_schedule(
      series, ScheduleMode::kSliding, parse_date("2006-12-31"), 365);
  const Eigen::Index first_len =
      schedule.steps[0].train_end - schedule.steps[0].train_begin + 1;
  for (const WalkForwardStep& step : schedule.steps) {
    CHECK(step.train_end - step.train_begin + 1 == first_len);
  }
  CHECK(schedule.steps.size() == 14);
}

TEST_CASE("a series ending at the first train end yields no schedule") {
  std::mt19937_64 rng(3);
  const PriceSeries series = testsup::random_series(rng, 50, 2, 0);
  const Date last = series.date(49);
  CHECK_THROWS_AS(
      build_schedule(series, ScheduleMode::kExtending, last, 30),
      ValidationError);
}

TEST_CASE("k-fold schedule breaks chronology and the harness refuses it") {
  std::mt19937_64 rng(4);
  const PriceSeries series = testsup::random_series(rng, 60, 2, 0);
  const WalkForwardSchedule folds = build_kfold_schedule(series, 5);
  CHECK(folds.steps.size() == 5);
  Eigen::Index covered = 0;
  bool chronological = true;
  for (const WalkForwardStep& step : folds.steps) {
    covered += step.test_end - step.test_begin + 1;
    if (step.test_begin > step.train_end) continue;
    chronological = false;
  }
  CHECK(covered == 60);
  CHECK_FALSE(chronological);

  UniformModel uniform;
  BacktestConfig bt;
  CHECK_THROWS_AS(run_walk_forward(series, folds, uniform, bt), ValidationError);
}

TEST_CASE("walk-forward with a constant model equals one long backtest") {
  std::mt19937_64 rng(5);
  const PriceSeries series = testsup::random_series(rng, 160, 2, 1, 0.015);
  const WalkForwardSchedule schedule =
      build_schedule(series, ScheduleMode::kExtending, series.date(79), 40);
  REQUIRE(schedule.steps.size() >= 2);

  UniformModel uniform;
  BacktestConfig bt;
  const WalkForwardRun run = run_walk_forward(series, schedule, uniform, bt);

  // single full-period backtest over the same evaluated days
  const Eigen::Index first_test = schedule.steps.front().test_begin;
  const PriceSeries sub = series.slice(first_test - 1 - bt.action_lag,
                                       series.size() - 1);
  const Eigen::MatrixXd decided =
      Eigen::MatrixXd::Constant(sub.size(), 2, 0.5);
  const BacktestResult direct = run_backtest(sub, decided, bt);

  REQUIRE(run.values.size() == direct.values.size());
  for (Eigen::Index i = 0; i < run.values.size(); ++i) {
    CHECK(run.values(i) == doctest::Approx(direct.values(i)).epsilon(1e-13));
  }
  CHECK(run.dates.size() == static_cast<std::size_t>(run.daily_returns.size()));
  CHECK(run.steps.size() == schedule.steps.size());
}

namespace {

// Records the exact train views it is fitted on.
class SpyModel : public AllocationModel {
 public:
  std::string name() const override { return "spy"; }
  void fit(const PriceSeries& train_view) override {
    fitted_views.push_back(train_view);
  }
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override {
    const Eigen::Index l = series.num_strategies();
    return Eigen::MatrixXd::Constant(end - begin + 1, l, 1.0 / double(l));
  }
  std::vector<PriceSeries> fitted_views;
};

}  // namespace

TEST_CASE("fitting never sees data past the train end") {
  std::mt19937_64 rng(6);
  const PriceSeries series = testsup::random_series(rng, 120, 2, 1);
  const WalkForwardSchedule schedule =
      build_schedule(series, ScheduleMode::kExtending, series.date(59), 30);

  SpyModel plain;
  BacktestConfig bt;
  run_walk_forward(series, schedule, plain, bt);

  // perturb everything strictly after each step's train end and refit
  for (std::size_t k = 0; k < schedule.steps.size(); ++k) {
    const WalkForwardStep& step = schedule.steps[k];
    Eigen::MatrixXd values = series.values();
    for (Eigen::Index u = step.train_end + 1; u < series.size(); ++u) {
      values.row(u).array() *= 1.37;
    }
    const PriceSeries mutated(series.dates(), series.names(), values,
                              series.num_strategies(), series.num_context());
    SpyModel probe;
    run_walk_forward(mutated, schedule, probe, bt);
    CHECK(probe.fitted_views[k] == plain.fitted_views[k]);
  }
}

TEST_CASE("trailing windows are computable from the concatenated path") {
  std::mt19937_64 rng(7);
  Eigen::VectorXd values(1300);
  values(0) = 1.0;
  std::normal_distribution<double> shock(0.0004, 0.01);
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    values(i) = values(i - 1) * (1.0 + shock(rng));
  }
  const MetricsReport three = trailing_metrics(values, 750);
  const MetricsReport five = trailing_metrics(values, 1250);
  const MetricsReport full = compute_metrics(values);
  CHECK(three.max_drawdown >= 0.0);
  CHECK(three.max_drawdown <= 1.0);
  CHECK(five.max_drawdown <= full.max_drawdown + 1e-15);

  // a window longer than the path falls back to the whole path
  const MetricsReport all = trailing_metrics(values, 5000);
  CHECK(all.annualized_return == doctest::Approx(full.annualized_return));
}

TEST_CASE("metrics reports stay finite with capped ratios") {
  Eigen::VectorXd rising(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    rising(i) = std::pow(1.001, static_cast<double>(i));
  }
  const MetricsReport report = compute_metrics(rising);
  CHECK(std::isfinite(report.sortino));
  CHECK(report.sortino == kRatioCap);  // no losing day
  CHECK(report.max_drawdown == 0.0);
}
