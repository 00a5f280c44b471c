#include "hedgebot/rewards.hpp"

#include <cmath>

#include "hedgebot/errors.hpp"

namespace hedgebot {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double growth(const EpisodeReturns& ep) {
  double g = 1.0;
  for (Eigen::Index i = 0; i < ep.daily.size(); ++i) g *= 1.0 + ep.daily(i);
  return g;
}

double annualized(const EpisodeReturns& ep) {
  return std::pow(growth(ep), 1.0 / ep.year_fraction) - 1.0;
}

// Population std of the strictly negative entries; count returned via n.
double downside_daily_std(const EpisodeReturns& ep, Eigen::Index* n_out,
                          double* mean_out) {
  Eigen::Index n = 0;
  double mean = 0.0;
  for (Eigen::Index i = 0; i < ep.daily.size(); ++i) {
    if (ep.daily(i) < 0.0) {
      ++n;
      mean += ep.daily(i);
    }
  }
  if (n_out) *n_out = n;
  if (n == 0) return -1.0;
  mean /= static_cast<double>(n);
  if (mean_out) *mean_out = mean;
  double accum = 0.0;
  for (Eigen::Index i = 0; i < ep.daily.size(); ++i) {
    if (ep.daily(i) < 0.0) {
      const double dev = ep.daily(i) - mean;
      accum += dev * dev;
    }
  }
  double sd = std::sqrt(accum / static_cast<double>(n));
  // Identical negatives must read as exactly zero spread; the summation
  // otherwise leaves an ulp-sized residue.
  if (sd <= 1e-12 * std::abs(mean)) sd = 0.0;
  return sd;
}

}  // namespace

EpisodeReturns EpisodeReturns::from_daily(Eigen::VectorXd daily_returns) {
  if (daily_returns.size() == 0) {
    throw ValidationError("episode has no daily returns");
  }
  EpisodeReturns ep;
  ep.year_fraction =
      static_cast<double>(daily_returns.size()) / kTradingDaysPerYear;
  ep.daily = std::move(daily_returns);
  return ep;
}

double net_profit(const EpisodeReturns& ep) {
  if (ep.daily.size() == 0) throw ValidationError("empty episode");
  return growth(ep) - 1.0;
}

double downside_std(const EpisodeReturns& ep) {
  const double sd = downside_daily_std(ep, nullptr, nullptr);
  if (sd < 0.0) {
    throw ValidationError("no negative daily returns; downside std undefined");
  }
  return std::sqrt(kTradingDaysPerYear) * sd;
}

double sortino(const EpisodeReturns& ep) {
  if (ep.daily.size() == 0) throw ValidationError("empty episode");
  const double mu = annualized(ep);
  const double sd = downside_daily_std(ep, nullptr, nullptr);
  if (sd <= 0.0) return sign_of(mu) * kRatioCap;
  return mu / (std::sqrt(kTradingDaysPerYear) * sd);
}

double reward(const EpisodeReturns& ep, RewardKind kind) {
  return kind == RewardKind::kNetProfit ? net_profit(ep) : sortino(ep);
}

Eigen::VectorXd net_profit_gradient(const EpisodeReturns& ep) {
  const double g = growth(ep);
  Eigen::VectorXd grad(ep.daily.size());
  for (Eigen::Index i = 0; i < ep.daily.size(); ++i) {
    grad(i) = g / (1.0 + ep.daily(i));
  }
  return grad;
}

Eigen::VectorXd sortino_gradient(const EpisodeReturns& ep) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(ep.daily.size());
  Eigen::Index n = 0;
  double mean = 0.0;
  const double sd_daily = downside_daily_std(ep, &n, &mean);
  if (sd_daily <= 0.0) return grad;  // capped regime is locally constant

  const double root = std::sqrt(kTradingDaysPerYear);
  const double sigma = root * sd_daily;
  const double g = growth(ep);
  const double mu = std::pow(g, 1.0 / ep.year_fraction) - 1.0;
  const double dmu_scale = std::pow(g, 1.0 / ep.year_fraction) / ep.year_fraction;
  for (Eigen::Index i = 0; i < ep.daily.size(); ++i) {
    const double dmu = dmu_scale / (1.0 + ep.daily(i));
    double dsigma = 0.0;
    if (ep.daily(i) < 0.0) {
      dsigma = root * (ep.daily(i) - mean) /
               (static_cast<double>(n) * sd_daily);
    }
    grad(i) = (dmu * sigma - mu * dsigma) / (sigma * sigma);
  }
  return grad;
}

Eigen::VectorXd reward_gradient(const EpisodeReturns& ep, RewardKind kind) {
  return kind == RewardKind::kNetProfit ? net_profit_gradient(ep)
                                        : sortino_gradient(ep);
}

}  // namespace hedgebot
