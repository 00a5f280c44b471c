#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "hedgebot/calendar.hpp"
#include "hedgebot/price_series.hpp"

namespace testsup {

using hedgebot::PriceSeries;

// Series with explicit per-column levels; strategies named strat_k, context
// columns appended as ctx_k.
inline PriceSeries series_from_levels(
    const std::vector<std::vector<double>>& strategy_levels,
    const std::vector<double>& risky_levels,
    const std::vector<std::vector<double>>& context_levels = {}) {
  const auto T = static_cast<Eigen::Index>(risky_levels.size());
  const auto l = static_cast<Eigen::Index>(strategy_levels.size());
  const auto p = static_cast<Eigen::Index>(context_levels.size());
  std::vector<std::string> names = {"risky"};
  Eigen::MatrixXd values(T, 1 + l + p);
  for (Eigen::Index t = 0; t < T; ++t) values(t, 0) = risky_levels[t];
  for (Eigen::Index k = 0; k < l; ++k) {
    names.push_back("strat_" + std::to_string(k + 1));
    for (Eigen::Index t = 0; t < T; ++t) {
      values(t, 1 + k) = strategy_levels[static_cast<std::size_t>(k)][t];
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    names.push_back("ctx_" + std::to_string(i + 1));
    for (Eigen::Index t = 0; t < T; ++t) {
      values(t, 1 + l + i) = context_levels[static_cast<std::size_t>(i)][t];
    }
  }
  return PriceSeries(
      hedgebot::weekday_calendar(hedgebot::parse_date("2010-01-04"),
                                 static_cast<std::size_t>(T)),
      std::move(names), std::move(values), l, p);
}

// Random-walk series for property tests: l strategies, p context features.
inline PriceSeries random_series(std::mt19937_64& rng, Eigen::Index days,
                                 Eigen::Index strategies, Eigen::Index context,
                                 double vol = 0.01) {
  std::normal_distribution<double> shock(0.0, vol);
  std::vector<double> risky(static_cast<std::size_t>(days));
  std::vector<std::vector<double>> strat(
      static_cast<std::size_t>(strategies),
      std::vector<double>(static_cast<std::size_t>(days)));
  std::vector<std::vector<double>> ctx(
      static_cast<std::size_t>(context),
      std::vector<double>(static_cast<std::size_t>(days)));
  risky[0] = 100.0;
  for (auto& s : strat) s[0] = 100.0;
  for (auto& c : ctx) c[0] = shock(rng);
  for (std::size_t t = 1; t < static_cast<std::size_t>(days); ++t) {
    risky[t] = risky[t - 1] * (1.0 + shock(rng));
    for (auto& s : strat) s[t] = s[t - 1] * (1.0 + shock(rng));
    for (auto& c : ctx) c[t] = c[t - 1] + shock(rng);
  }
  return series_from_levels(strat, risky, ctx);
}

// Central finite difference of a scalar function at x along coordinate i.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, Eigen::Index i,
                                 double step = 1e-5) {
  Eigen::VectorXd up = x, down = x;
  up(i) += step;
  down(i) -= step;
  return (f(up) - f(down)) / (2.0 * step);
}

// Random point on the simplex.
inline Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index l) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(l);
  for (Eigen::Index i = 0; i < l; ++i) w(i) = expo(rng);
  return w / w.sum();
}

}  // namespace testsup
