#pragma once

#include <Eigen/Dense>

namespace hedgebot {

inline constexpr double kTradingDaysPerYear = 250.0;
inline constexpr double kRatioCap = 1e6;

// Daily portfolio simple returns over one episode.
struct EpisodeReturns {
  Eigen::VectorXd daily;
  double year_fraction = 0.0;

  static EpisodeReturns from_daily(Eigen::VectorXd daily_returns);
};

enum class RewardKind { kNetProfit, kSortino };

// prod(1 + r_t) - 1.
double net_profit(const EpisodeReturns& ep);

// sqrt(250) * population std of the strictly negative daily returns.
// Throws ValidationError when no negative return exists; callers that want
// the capped-ratio convention use sortino() instead.
double downside_std(const EpisodeReturns& ep);

// Annualized return over downside std. Degenerate downside (no negative
// returns, or all negatives equal) maps to sign(annualized return) * 1e6.
double sortino(const EpisodeReturns& ep);

double reward(const EpisodeReturns& ep, RewardKind kind);

// d reward / d daily_returns. The Sortino gradient is zero in the capped
// regime and undefined on the measure-zero kink at r_t == 0.
Eigen::VectorXd net_profit_gradient(const EpisodeReturns& ep);
Eigen::VectorXd sortino_gradient(const EpisodeReturns& ep);
Eigen::VectorXd reward_gradient(const EpisodeReturns& ep, RewardKind kind);

}  // namespace hedgebot
