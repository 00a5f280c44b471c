#include "hedgebot/simulator.hpp"

#include <cmath>
#include <fstream>

#include "hedgebot/errors.hpp"
#include "hedgebot/features.hpp"
#include "hedgebot/io_util.hpp"

namespace hedgebot {

namespace {

constexpr double kSimplexTol = 1e-9;

// Rows must sit on the simplex or be identically zero (risky-only).
void check_weight_rows(const Eigen::MatrixXd& weights) {
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    const double sum = weights.row(r).sum();
    bool all_zero = true;
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      if (weights(r, c) != 0.0) all_zero = false;
      if (weights(r, c) < -kSimplexTol) {
        throw ValidationError("negative weight at decision row " +
                              std::to_string(r));
      }
    }
    if (!all_zero && std::abs(sum - 1.0) > kSimplexTol) {
      throw ValidationError("weight row " + std::to_string(r) +
                            " off the simplex (sum " + std::to_string(sum) + ")");
    }
  }
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void BacktestConfig::validate() const {
  if (commission < 0.0) throw ValidationError("commission must be >= 0");
  if (action_lag != 0 && action_lag != 1) {
    throw ValidationError("action lag must be 0 or 1");
  }
  if (!(overlay_budget > 0.0 && overlay_budget <= 1.0)) {
    throw ValidationError("overlay budget must be in (0, 1]");
  }
}

BacktestResult run_backtest(const PriceSeries& series,
                            const Eigen::MatrixXd& decided_weights,
                            const BacktestConfig& config) {
  config.validate();
  const Eigen::Index T = series.size();
  const Eigen::Index l = series.num_strategies();
  if (decided_weights.rows() != T || decided_weights.cols() != l) {
    throw ValidationError("decided weights must be T x l aligned with the series");
  }
  check_weight_rows(decided_weights);

  const Eigen::Index first = 1 + config.action_lag;
  if (first >= T) throw ValidationError("series too short for the action lag");
  const Eigen::Index n = T - first;

  BacktestResult result;
  result.dates.reserve(static_cast<std::size_t>(n));
  result.values.resize(n + 1);
  result.weights_applied.resize(n, l);
  result.daily_returns.resize(n);
  result.turnover.resize(n);
  result.cost_paid.resize(n);
  result.values(0) = 1.0;

  for (Eigen::Index u = first; u < T; ++u) {
    const Eigen::Index k = u - first;
    const Eigen::Index decision = u - 1 - config.action_lag;
    result.dates.push_back(series.date(u));
    result.weights_applied.row(k) = decided_weights.row(decision);

    double turn = 0.0;
    if (k > 0) {
      turn = (result.weights_applied.row(k) - result.weights_applied.row(k - 1))
                 .cwiseAbs()
                 .sum();
    }
    result.turnover(k) = turn;
    result.cost_paid(k) = config.commission * turn;

    double overlay = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) {
      overlay += result.weights_applied(k, i) *
                 compute_returns(series, series.strategy_column(i), u);
    }
    const double ret = compute_returns(series, 0, u) +
                       config.overlay_budget * overlay - result.cost_paid(k);
    result.daily_returns(k) = ret;
    const double next = result.values(k) * (1.0 + ret);
    if (!(next > 0.0)) {
      throw ValidationError("portfolio value hit zero on " +
                            format_date(series.date(u)));
    }
    result.values(k + 1) = next;
  }
  return result;
}

Eigen::MatrixXd backtest_weight_gradient(const PriceSeries& series,
                                         const Eigen::MatrixXd& decided_weights,
                                         const BacktestConfig& config,
                                         const Eigen::VectorXd& dreturns) {
  config.validate();
  const Eigen::Index T = series.size();
  const Eigen::Index l = series.num_strategies();
  const Eigen::Index first = 1 + config.action_lag;
  const Eigen::Index n = T - first;
  if (dreturns.size() != n) {
    throw ValidationError("reward gradient length does not match evaluated days");
  }

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(T, l);
  for (Eigen::Index u = first; u < T; ++u) {
    const Eigen::Index k = u - first;
    const Eigen::Index decision = u - 1 - config.action_lag;
    // Return term.
    for (Eigen::Index i = 0; i < l; ++i) {
      grad(decision, i) += dreturns(k) * config.overlay_budget *
                           compute_returns(series, series.strategy_column(i), u);
    }
    // Turnover cost couples this decision with the previous one.
    if (k > 0) {
      const Eigen::Index prev = decision - 1;
      for (Eigen::Index i = 0; i < l; ++i) {
        const double s =
            sign_of(decided_weights(decision, i) - decided_weights(prev, i));
        grad(decision, i) -= dreturns(k) * config.commission * s;
        grad(prev, i) += dreturns(k) * config.commission * s;
      }
    }
  }
  return grad;
}

EpisodeReturns episode_returns(const BacktestResult& result) {
  if (result.daily_returns.size() == 0) {
    throw ValidationError("empty backtest result");
  }
  return EpisodeReturns::from_daily(result.daily_returns);
}

void BacktestResult::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "date,value";
  for (Eigen::Index i = 0; i < weights_applied.cols(); ++i) {
    out << ",weight_" << (i + 1);
  }
  out << ",daily_return,turnover,cost\n";
  for (std::size_t k = 0; k < dates.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    out << format_date(dates[k]) << ',' << format_double(values(row + 1));
    for (Eigen::Index i = 0; i < weights_applied.cols(); ++i) {
      out << ',' << format_double(weights_applied(row, i));
    }
    out << ',' << format_double(daily_returns(row)) << ','
        << format_double(turnover(row)) << ',' << format_double(cost_paid(row))
        << '\n';
  }
}

}  // namespace hedgebot
