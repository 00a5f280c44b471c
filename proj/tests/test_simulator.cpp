#include <doctest.h>

#include <random>

#include "hedgebot/errors.hpp"
#include "hedgebot/simulator.hpp"
#include "test_support.hpp"

using namespace hedgebot;

namespace {

// weights on all T rows set to one row value
Eigen::MatrixXd constant_weights(Eigen::Index T, const Eigen::VectorXd& row) {
  Eigen::MatrixXd w(T, row.size());
  for (Eigen::Index t = 0; t < T; ++t) w.row(t) = row;
  return w;
}

}  // namespace

TEST_CASE("flat prices and constant weights give a flat unit path") {
  std::vector<double> flat(10, 100.0);
  const PriceSeries series = testsup::series_from_levels({flat, flat}, flat);
  Eigen::VectorXd row(2);
  row << 0.6, 0.4;
  BacktestConfig config;
  const BacktestResult result =
      run_backtest(series, constant_weights(10, row), config);
  CHECK(result.values.size() == 9);  // 8 evaluated days + leading 1.0
  for (Eigen::Index i = 0; i < result.values.size(); ++i) {
    CHECK(result.values(i) == 1.0);
  }
  CHECK(result.turnover.maxCoeff() == 0.0);
  CHECK(result.cost_paid.maxCoeff() == 0.0);
}

TEST_CASE("a full switch day costs commission times turnover two") {
  std::vector<double> flat(8, 100.0);
  const PriceSeries series = testsup::series_from_levels({flat, flat}, flat);
  Eigen::MatrixXd weights(8, 2);
  for (Eigen::Index t = 0; t < 8; ++t) {
    weights(t, 0) = t < 4 ? 1.0 : 0.0;
    weights(t, 1) = t < 4 ? 0.0 : 1.0;
  }
  BacktestConfig config;  // commission 0.0030, lag 1
  const BacktestResult result = run_backtest(series, weights, config);
  // decision row 4 applies on day 6, evaluated index 4
  CHECK(result.turnover(4) == 2.0);
  CHECK(result.cost_paid(4) == 0.0030 * 2.0);
  CHECK(result.daily_returns(4) == doctest::Approx(-0.006).epsilon(1e-14));
  CHECK(result.cost_paid.sum() == 0.0030 * 2.0);
}

TEST_CASE("action lag shifts when a decision earns its return") {
  // strategy A pays +1% only on day 3 (return from day 2 to day 3)
  std::vector<double> a = {100, 100, 100, 101, 101, 101};
  std::vector<double> b(6, 100.0);
  std::vector<double> risky(6, 100.0);
  const PriceSeries series = testsup::series_from_levels({a, b}, risky);

  // the agent decides full A at t = 2, full B on every other day
  Eigen::MatrixXd weights(6, 2);
  for (Eigen::Index t = 0; t < 6; ++t) {
    weights(t, 0) = t == 2 ? 1.0 : 0.0;
    weights(t, 1) = t == 2 ? 0.0 : 1.0;
  }
  BacktestConfig lag0;
  lag0.action_lag = 0;
  lag0.commission = 0.0;
  BacktestConfig lag1;
  lag1.action_lag = 1;
  lag1.commission = 0.0;

  // lag 0: decision at 2 earns the day-3 return -> captures +1%
  const BacktestResult r0 = run_backtest(series, weights, lag0);
  // lag 1: decision at 2 earns the day-4 return -> misses it
  const BacktestResult r1 = run_backtest(series, weights, lag1);

  CHECK(r0.values(r0.values.size() - 1) ==
        doctest::Approx(1.01).epsilon(1e-12));
  CHECK(r1.values(r1.values.size() - 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overlay arithmetic matches direct accounting on random data") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const PriceSeries series = testsup::random_series(rng, 12, 3, 0);
    const Eigen::VectorXd row = testsup::random_simplex(rng, 3);
    BacktestConfig config;
    config.commission = 0.0;
    config.overlay_budget = 0.7;
    const BacktestResult result =
        run_backtest(series, constant_weights(12, row), config);
    for (Eigen::Index k = 0; k < result.daily_returns.size(); ++k) {
      const Eigen::Index u = k + 2;  // first evaluated day is 1 + lag = 2
      double expected = series.risky_level(u) / series.risky_level(u - 1) - 1.0;
      for (Eigen::Index i = 0; i < 3; ++i) {
        expected += 0.7 * row(i) *
                    (series.strategy_level(u, i) / series.strategy_level(u - 1, i) -
                     1.0);
      }
      CHECK(result.daily_returns(k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("higher commission never helps") {
  std::mt19937_64 rng(19);
  const PriceSeries series = testsup::random_series(rng, 40, 2, 0);
  Eigen::MatrixXd weights(40, 2);
  for (Eigen::Index t = 0; t < 40; ++t) {
    weights.row(t) = testsup::random_simplex(rng, 2);
  }
  BacktestConfig cheap;
  cheap.commission = 0.001;
  BacktestConfig dear;
  dear.commission = 0.005;
  const BacktestResult a = run_backtest(series, weights, cheap);
  const BacktestResult b = run_backtest(series, weights, dear);
  for (Eigen::Index i = 0; i < a.values.size(); ++i) {
    CHECK(b.values(i) <= a.values(i) + 1e-15);
  }
}

TEST_CASE("prescient weights do at least as well with no lag") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const PriceSeries series = testsup::random_series(rng, 30, 3, 0, 0.02);
    // oracle: all-in on tomorrow's best strategy
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(30, 3);
    for (Eigen::Index t = 0; t < 29; ++t) {
      Eigen::Index best = 0;
      double best_ret = -1e9;
      for (Eigen::Index i = 0; i < 3; ++i) {
        const double r =
            series.strategy_level(t + 1, i) / series.strategy_level(t, i) - 1.0;
        if (r > best_ret) {
          best_ret = r;
          best = i;
        }
      }
      weights(t, best) = 1.0;
    }
    weights.row(29) = weights.row(28);

    BacktestConfig lag0;
    lag0.action_lag = 0;
    BacktestConfig lag1;
    lag1.action_lag = 1;
    const BacktestResult r0 = run_backtest(series, weights, lag0);
    const BacktestResult r1 = run_backtest(series, weights, lag1);
    // compare over the common evaluated days (lag-1 starts one day later)
    const double total0 = r0.values(r0.values.size() - 1) / r0.values(1);
    const double total1 = r1.values(r1.values.size() - 1);
    CHECK(total0 >= total1 - 1e-12);
  }
}

TEST_CASE("weight rows must sit on the simplex or be all zero") {
  std::vector<double> flat(6, 100.0);
  const PriceSeries series = testsup::series_from_levels({flat, flat}, flat);
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(6, 2);
  BacktestConfig config;
  CHECK_NOTHROW(run_backtest(series, weights, config));  // risky only

  weights.setConstant(0.6);  // rows sum to 1.2
  CHECK_THROWS_AS(run_backtest(series, weights, config), ValidationError);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(6, 2);
  bad(3, 0) = 1.2;
  bad(3, 1) = -0.2;
  CHECK_THROWS_AS(run_backtest(series, bad, config), ValidationError);

  CHECK_THROWS_AS(run_backtest(series, Eigen::MatrixXd::Zero(4, 2), config),
                  ValidationError);
}

TEST_CASE("episode_returns packages returns and the year fraction") {
  std::vector<double> flat(252, 100.0);
  const PriceSeries series = testsup::series_from_levels({flat}, flat);
  Eigen::MatrixXd weights = Eigen::MatrixXd::Ones(252, 1);
  BacktestConfig config;
  const BacktestResult result = run_backtest(series, weights, config);
  const EpisodeReturns ep = episode_returns(result);
  CHECK(ep.daily.size() == 250);
  CHECK(ep.year_fraction == doctest::Approx(1.0));
  CHECK(ep.daily.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulator gradient matches finite differences") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const PriceSeries series = testsup::random_series(rng, 10, 2, 0, 0.02);
    Eigen::MatrixXd weights(10, 2);
    for (Eigen::Index t = 0; t < 10; ++t) {
      weights.row(t) = testsup::random_simplex(rng, 2);
    }
    BacktestConfig config;
    for (int lag : {0, 1}) {
      config.action_lag = lag;
      const Eigen::Index n = 10 - 1 - lag;
      // random reward gradient over the evaluated days
      Eigen::VectorXd dr(n);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) dr(i) = dist(rng);

      const Eigen::MatrixXd grad =
          backtest_weight_gradient(series, weights, config, dr);

      auto objective = [&](const Eigen::MatrixXd& w) {
        const BacktestResult r = run_backtest(series, w, config);
        return dr.dot(r.daily_returns);
      };
      // probe along simplex-preserving directions (+h on one leg, -h on the
      // other), away from the |dw| turnover kink
      for (Eigen::Index t = 0; t < 10; ++t) {
        bool near_kink = false;
        for (Eigen::Index s : {t - 1, t + 1}) {
          if (s < 0 || s >= 10) continue;
          for (Eigen::Index i = 0; i < 2; ++i) {
            if (std::abs(weights(t, i) - weights(s, i)) < 1e-4) near_kink = true;
          }
        }
        if (near_kink || weights(t, 0) < 1e-4 || weights(t, 1) < 1e-4) continue;
        const double h = 1e-6;
        Eigen::MatrixXd up = weights, down = weights;
        up(t, 0) += h;
        up(t, 1) -= h;
        down(t, 0) -= h;
        down(t, 1) += h;
        const double fd = (objective(up) - objective(down)) / (2.0 * h);
        const double analytic = grad(t, 0) - grad(t, 1);
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}
