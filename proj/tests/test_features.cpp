#include <doctest.h>

#include <cmath>

#include "hedgebot/errors.hpp"
#include "hedgebot/features.hpp"
#include "test_support.hpp"

using namespace hedgebot;

TEST_CASE("lag set invariants") {
  CHECK_NOTHROW(LagSet({60, 20, 4, 3, 2, 1, 0}));
  CHECK_NOTHROW(LagSet({0, 1, 2}));
  CHECK_THROWS_AS(LagSet({1, 2, 3}), ValidationError);   // missing 0
  CHECK_THROWS_AS(LagSet({0, 2, 1}), ValidationError);   // not monotone
  CHECK_THROWS_AS(LagSet({0, 1, 1}), ValidationError);   // duplicate
  CHECK_THROWS_AS(LagSet({-1, 0}), ValidationError);
  CHECK(LagSet().max_lag() == 60);
}

TEST_CASE("compute_returns matches hand arithmetic") {
  const PriceSeries series =
      testsup::series_from_levels({{100, 101, 101, 80, 76}}, {100, 100, 100, 100, 100});
  const auto col = series.strategy_column(0);
  CHECK(compute_returns(series, col, 1) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(compute_returns(series, col, 2) == 0.0);
  CHECK(compute_returns(series, col, 4) == doctest::Approx(-0.05).epsilon(1e-14));
  CHECK_THROWS_AS(compute_returns(series, col, 0), ValidationError);
}

TEST_CASE("rolling_vol is the population std of the last d returns") {
  // returns +0.01 then -0.01: mean 0, population var 1e-4.
  const PriceSeries series =
      testsup::series_from_levels({{100, 101, 99.99}}, {100, 100, 100});
  const auto col = series.strategy_column(0);
  CHECK(rolling_vol(series, col, 2, 2) == doctest::Approx(0.01).epsilon(1e-12));
  // single return deviates zero from its own mean
  CHECK(rolling_vol(series, col, 1, 1) == 0.0);
  CHECK_THROWS_AS(rolling_vol(series, col, 1, 2), ValidationError);

  const PriceSeries flat =
      testsup::series_from_levels({{100, 100, 100, 100}}, {100, 100, 100, 100});
  CHECK(rolling_vol(flat, flat.strategy_column(0), 3, 3) == 0.0);
}

TEST_CASE("build_observation on a constant series with lag [0]") {
  std::vector<double> level(10, 100.0);
  const PriceSeries series = testsup::series_from_levels({level}, level);
  FeatureConfig fc;
  fc.asset_lags = LagSet({0});
  fc.context_lags = LagSet({0});
  fc.vol_window = 3;
  const ContextStats stats = compute_context_stats(series, 0, 9);
  const Observation obs = build_observation(series, 5, fc, stats);
  CHECK(obs.returns.rows() == 1);
  CHECK(obs.returns.cols() == 1);
  CHECK(obs.returns(0, 0) == 0.0);
  CHECK(obs.vols(0, 0) == 0.0);
  // derived rows only (p = 0): min ret, max ret, max vol
  CHECK(obs.context.rows() == 3);
  CHECK(obs.context(0, 0) == 0.0);
  CHECK(obs.context(1, 0) == 0.0);
  CHECK(obs.context(2, 0) == 0.0);
}

TEST_CASE("derived context rows carry min and max strategy returns") {
  // strategy 1 returns +0.02, strategy 2 returns -0.01 at the last day
  const PriceSeries series = testsup::series_from_levels(
      {{100, 100, 102}, {100, 100, 99}}, {100, 100, 100});
  FeatureConfig fc;
  fc.asset_lags = LagSet({0});
  fc.context_lags = LagSet({0});
  fc.vol_window = 2;
  const ContextStats stats = compute_context_stats(series, 0, 2);
  const Observation obs = build_observation(series, 2, fc, stats);
  CHECK(obs.context(0, 0) == doctest::Approx(-0.01).epsilon(1e-12));  // min
  CHECK(obs.context(1, 0) == doctest::Approx(0.02).epsilon(1e-12));   // max
  CHECK(obs.context(2, 0) >= 0.0);                                    // max vol
}

TEST_CASE("default lag grid gives the documented shapes") {
  std::mt19937_64 rng(5);
  const PriceSeries series = testsup::random_series(rng, 120, 4, 2);
  FeatureConfig fc;  // defaults: [60,20,4,3,2,1,0], d = 20
  const ContextStats stats = compute_context_stats(series, 0, 119);
  const Observation obs = build_observation(series, 90, fc, stats);
  CHECK(obs.returns.rows() == 4);
  CHECK(obs.returns.cols() == 7);
  CHECK(obs.vols.rows() == 4);
  CHECK(obs.vols.cols() == 7);
  CHECK(obs.context.rows() == 2 + 3);
  CHECK(obs.context.cols() == 7);
  CHECK(fc.min_observation_index() == 80);
  CHECK_THROWS_AS(build_observation(series, 79, fc, stats), ValidationError);
}

TEST_CASE("observation entries are finite and vols nonnegative") {
  std::mt19937_64 rng(17);
  const PriceSeries series = testsup::random_series(rng, 150, 3, 2, 0.02);
  FeatureConfig fc;
  const ContextStats stats = compute_context_stats(series, 0, 100);
  for (Eigen::Index t : {80, 100, 120, 149}) {
    const Observation obs = build_observation(series, t, fc, stats);
    CHECK(obs.returns.allFinite());
    CHECK(obs.vols.allFinite());
    CHECK(obs.context.allFinite());
    CHECK(obs.vols.minCoeff() >= 0.0);
  }
}

TEST_CASE("causality: future prices never reach an observation") {
  std::mt19937_64 rng(23);
  const PriceSeries series = testsup::random_series(rng, 140, 2, 1);
  FeatureConfig fc;
  const ContextStats stats = compute_context_stats(series, 0, 100);
  const Eigen::Index t = 100;
  const Observation before = build_observation(series, t, fc, stats);

  // mutate strictly-future levels, keeping the context stats fixed
  PriceSeries mutated = [&] {
    Eigen::MatrixXd values = series.values();
    for (Eigen::Index u = t + 1; u < series.size(); ++u) {
      values.row(u).array() += 17.0;
    }
    return PriceSeries(series.dates(), series.names(), values,
                       series.num_strategies(), series.num_context());
  }();
  const Observation after = build_observation(mutated, t, fc, stats);
  CHECK(before.returns == after.returns);
  CHECK(before.vols == after.vols);
  CHECK(before.context == after.context);
}

TEST_CASE("shift equivariance: irrelevant history does not change the state") {
  std::mt19937_64 rng(29);
  const PriceSeries series = testsup::random_series(rng, 160, 2, 1);
  FeatureConfig fc;
  fc.asset_lags = LagSet({5, 1, 0});
  fc.context_lags = LagSet({2, 0});
  fc.vol_window = 4;
  const ContextStats stats = compute_context_stats(series, 100, 130);

  const Observation full = build_observation(series, 120, fc, stats);
  // drop the first 50 rows: the lagged window around t=120 is untouched
  const PriceSeries trimmed = series.slice(50, 159);
  const Observation shifted = build_observation(trimmed, 70, fc, stats);
  CHECK(full.returns == shifted.returns);
  CHECK(full.vols == shifted.vols);
  CHECK(full.context == shifted.context);
}

TEST_CASE("context z-scoring uses train stats; zero-std features pass centered") {
  // feature 1 varies, feature 2 constant
  const PriceSeries series = testsup::series_from_levels(
      {{100, 100, 100, 100, 100, 100}}, {100, 100, 100, 100, 100, 100},
      {{1, 2, 3, 4, 5, 6}, {7, 7, 7, 7, 7, 7}});
  FeatureConfig fc;
  fc.asset_lags = LagSet({0});
  fc.context_lags = LagSet({0});
  fc.vol_window = 2;
  const ContextStats stats = compute_context_stats(series, 0, 3);  // mean 2.5
  CHECK(stats.mean(0) == doctest::Approx(2.5));
  CHECK(stats.stdev(1) == 0.0);
  const Observation obs = build_observation(series, 4, fc, stats);
  const double expected = (5.0 - 2.5) / stats.stdev(0);
  CHECK(obs.context(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(obs.context(1, 0) == 0.0);  // centered, unscaled
}
