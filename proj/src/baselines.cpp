#include "hedgebot/baselines.hpp"

#include <cmath>
#include <limits>

#include "hedgebot/errors.hpp"
#include "hedgebot/features.hpp"

namespace hedgebot {

namespace {

constexpr double kRidge = 1e-8;
constexpr double kPrimalTol = 1e-10;
constexpr double kDualTol = 1e-9;

struct QpCandidate {
  Eigen::VectorXd w;
  double variance = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Solve the equality-constrained KKT system on support S, with or without
// the return floor active, and check the inequality multipliers.
QpCandidate solve_support(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                          double floor, const std::vector<Eigen::Index>& support,
                          bool floor_active) {
  QpCandidate cand;
  const auto s = static_cast<Eigen::Index>(support.size());
  const Eigen::Index l = mu.size();
  const Eigen::Index dim = s + 1 + (floor_active ? 1 : 0);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      kkt(a, b) = 2.0 * sigma(support[a], support[b]);
    }
    kkt(a, s) = -1.0;
    kkt(s, a) = 1.0;
    if (floor_active) {
      kkt(a, s + 1) = -mu(support[a]);
      kkt(s + 1, a) = mu(support[a]);
    }
  }
  rhs(s) = 1.0;
  if (floor_active) rhs(s + 1) = floor;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return cand;
  const Eigen::VectorXd sol = lu.solve(rhs);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
  for (Eigen::Index a = 0; a < s; ++a) {
    if (sol(a) < -kPrimalTol) return cand;
    w(support[a]) = std::max(0.0, sol(a));
  }
  const double lambda = sol(s);
  const double nu = floor_active ? sol(s + 1) : 0.0;
  if (floor_active && nu < -kDualTol) return cand;
  if (!floor_active && mu.dot(w) < floor - kDualTol * (1.0 + std::abs(floor))) {
    return cand;
  }
  // Excluded assets must not offer a descent direction.
  const Eigen::VectorXd sw = sigma * w;
  for (Eigen::Index i = 0; i < l; ++i) {
    bool in_support = false;
    for (Eigen::Index a = 0; a < s; ++a) {
      if (support[a] == i) {
        in_support = true;
        break;
      }
    }
    if (!in_support && 2.0 * sw(i) - lambda - nu * mu(i) < -kDualTol) {
      return cand;
    }
  }
  cand.w = w / w.sum();
  cand.variance = cand.w.dot(sigma * cand.w);
  cand.feasible = true;
  return cand;
}

Eigen::Index argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

Eigen::Index argmin(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) < v(best)) best = i;
  }
  return best;
}

// Trailing cumulative return level(t) / level(t - lookback) - 1 per strategy.
Eigen::VectorXd trailing_returns(const PriceSeries& series, Eigen::Index t,
                                 int lookback) {
  if (t - lookback < 0) {
    throw ValidationError("decision day lacks the trailing lookback window");
  }
  const Eigen::Index l = series.num_strategies();
  Eigen::VectorXd out(l);
  for (Eigen::Index k = 0; k < l; ++k) {
    out(k) = series.strategy_level(t, k) / series.strategy_level(t - lookback, k) -
             1.0;
  }
  return out;
}

template <typename Solve>
Eigen::MatrixXd rebalanced_path(const PriceSeries& series, Eigen::Index begin,
                                Eigen::Index end, int rebalance_period,
                                Solve&& solve) {
  if (begin < 0 || end >= series.size() || begin > end) {
    throw ValidationError("bad decision range");
  }
  if (rebalance_period < 1) {
    throw ValidationError("rebalance period must be >= 1");
  }
  const Eigen::Index l = series.num_strategies();
  Eigen::MatrixXd path(end - begin + 1, l);
  Eigen::VectorXd current;
  for (Eigen::Index t = begin; t <= end; ++t) {
    if (current.size() == 0 || (t - begin) % rebalance_period == 0) {
      current = solve(t);
    }
    path.row(t - begin) = current;
  }
  return path;
}

}  // namespace

void MarkowitzConfig::validate() const {
  if (lookback < 2) throw ValidationError("lookback must be >= 2");
  if (rebalance_period < 1) throw ValidationError("rebalance period must be >= 1");
}

Eigen::VectorXd min_variance_qp(const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& sigma, double floor) {
  const Eigen::Index l = mu.size();
  if (l < 1) throw ValidationError("empty mean vector");
  if (sigma.rows() != l || sigma.cols() != l) {
    throw ValidationError("covariance must be square and match mu");
  }
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValidationError("covariance must be symmetric");
  }
  Eigen::MatrixXd reg = sigma;
  reg.diagonal().array() += kRidge;

  QpCandidate best;
  const auto subsets = Eigen::Index{1} << l;
  for (Eigen::Index mask = 1; mask < subsets; ++mask) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < l; ++i) {
      if (mask & (Eigen::Index{1} << i)) support.push_back(i);
    }
    for (bool active : {false, true}) {
      const QpCandidate cand = solve_support(mu, reg, floor, support, active);
      if (cand.feasible && cand.variance < best.variance) best = cand;
    }
  }
  if (!best.feasible) {
    // Floor above every attainable return: all-in on the best expected return.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
    w(argmax(mu)) = 1.0;
    return w;
  }
  return best.w;
}

Eigen::MatrixXd markowitz_decide(const PriceSeries& series, Eigen::Index begin,
                                 Eigen::Index end,
                                 const MarkowitzConfig& config) {
  config.validate();
  const Eigen::Index l = series.num_strategies();
  return rebalanced_path(
      series, begin, end, config.rebalance_period, [&](Eigen::Index t) {
        if (t - config.lookback < 1) {
          throw ValidationError("decision day lacks the estimation lookback");
        }
        Eigen::MatrixXd rets(config.lookback, l);
        for (Eigen::Index k = 0; k < l; ++k) {
          for (int i = 0; i < config.lookback; ++i) {
            rets(i, k) = compute_returns(series, series.strategy_column(k),
                                         t - config.lookback + 1 + i);
          }
        }
        const Eigen::VectorXd mean = rets.colwise().mean();
        const Eigen::MatrixXd centered = rets.rowwise() - mean.transpose();
        const Eigen::MatrixXd cov = kTradingDaysPerYear *
                                    (centered.transpose() * centered) /
                                    static_cast<double>(config.lookback);
        const Eigen::VectorXd mu = kTradingDaysPerYear * mean;
        return min_variance_qp(mu, cov, mu.mean());
      });
}

Eigen::MatrixXd follow_winner(const PriceSeries& series, Eigen::Index begin,
                              Eigen::Index end, int lookback,
                              int rebalance_period) {
  const Eigen::Index l = series.num_strategies();
  return rebalanced_path(series, begin, end, rebalance_period,
                         [&](Eigen::Index t) {
                           Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
                           w(argmax(trailing_returns(series, t, lookback))) = 1.0;
                           return w;
                         });
}

Eigen::MatrixXd follow_loser(const PriceSeries& series, Eigen::Index begin,
                             Eigen::Index end, int lookback,
                             int rebalance_period) {
  const Eigen::Index l = series.num_strategies();
  return rebalanced_path(series, begin, end, rebalance_period,
                         [&](Eigen::Index t) {
                           Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
                           w(argmin(trailing_returns(series, t, lookback))) = 1.0;
                           return w;
                         });
}

Eigen::MatrixXd risky_only(Eigen::Index strategies, Eigen::Index days) {
  return Eigen::MatrixXd::Zero(days, strategies);
}

}  // namespace hedgebot
