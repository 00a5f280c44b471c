#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hedgebot/calendar.hpp"

namespace hedgebot {

// Dated levels for one risky asset, l hedging strategies and p context
// features, stored column-wise: [risky | strategy_1..l | ctx_1..p].
// Immutable after construction; cheap to copy at desk scale.
class PriceSeries {
 public:
  PriceSeries(std::vector<Date> dates, std::vector<std::string> names,
              Eigen::MatrixXd values, Eigen::Index num_strategies,
              Eigen::Index num_context);

  Eigen::Index size() const { return static_cast<Eigen::Index>(dates_.size()); }
  Eigen::Index num_columns() const { return values_.cols(); }
  Eigen::Index num_strategies() const { return num_strategies_; }
  Eigen::Index num_context() const { return num_context_; }

  const std::vector<Date>& dates() const { return dates_; }
  Date date(Eigen::Index t) const { return dates_[static_cast<std::size_t>(t)]; }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }

  double level(Eigen::Index t, Eigen::Index col) const { return values_(t, col); }
  double risky_level(Eigen::Index t) const { return values_(t, 0); }
  double strategy_level(Eigen::Index t, Eigen::Index k) const {
    return values_(t, 1 + k);
  }
  double context_level(Eigen::Index t, Eigen::Index i) const {
    return values_(t, 1 + num_strategies_ + i);
  }
  Eigen::Index strategy_column(Eigen::Index k) const { return 1 + k; }
  Eigen::Index context_column(Eigen::Index i) const {
    return 1 + num_strategies_ + i;
  }

  // First index whose date is >= d (size() if none).
  Eigen::Index lower_bound(Date d) const;
  // Last index whose date is <= d (-1 if none).
  Eigen::Index last_on_or_before(Date d) const;

  // Inclusive row range [first, last] as a standalone series.
  PriceSeries slice(Eigen::Index first, Eigen::Index last) const;

  bool operator==(const PriceSeries& other) const;

 private:
  std::vector<Date> dates_;
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;
  Eigen::Index num_strategies_ = 0;
  Eigen::Index num_context_ = 0;
};

// One homogeneous stretch of a synthetic path: `length` daily levels whose
// day-over-day returns are drift + vol * N(0,1).
struct RegimeSegment {
  Eigen::Index length = 0;
  double drift = 0.0;
  double vol = 0.0;
};

struct RegimeSpec {
  std::vector<std::string> names;                     // one per column
  std::vector<std::vector<RegimeSegment>> segments;   // one list per column
  Eigen::Index num_context = 0;                       // trailing columns
  std::uint64_t seed = 12345;
  Date start = parse_date("2000-01-03");

  void validate() const;
  // Index of the segment that owns day t for column `col`.
  Eigen::Index segment_at(Eigen::Index col, Eigen::Index t) const;
};

// Wide CSV: header `date,<name>,...`; ISO dates; context columns are the
// trailing ones whose names start with "ctx_".
PriceSeries load_csv(const std::filesystem::path& path);
void write_csv(const PriceSeries& series, const std::filesystem::path& path);

// Geometric random walk from level 100 per column, regime by regime.
// Deterministic for a fixed spec + seed.
PriceSeries synthesize(const RegimeSpec& spec);

}  // namespace hedgebot
