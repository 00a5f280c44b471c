#include "hedgebot/price_series.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "hedgebot/errors.hpp"
#include "hedgebot/io_util.hpp"

namespace hedgebot {

namespace {

bool is_context_name(const std::string& name) {
  return name.rfind("ctx_", 0) == 0;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<std::string> names,
                         Eigen::MatrixXd values, Eigen::Index num_strategies,
                         Eigen::Index num_context)
    : dates_(std::move(dates)),
      names_(std::move(names)),
      values_(std::move(values)),
      num_strategies_(num_strategies),
      num_context_(num_context) {
  const auto T = static_cast<Eigen::Index>(dates_.size());
  if (T == 0) throw ValidationError("price series is empty");
  if (values_.rows() != T) {
    throw ValidationError("value rows do not match date count");
  }
  if (values_.cols() != 1 + num_strategies_ + num_context_) {
    throw ValidationError("column count does not match 1 + strategies + context");
  }
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    throw ValidationError("name count does not match column count");
  }
  for (Eigen::Index t = 1; t < T; ++t) {
    if (!(dates_[t - 1] < dates_[t])) {
      throw ValidationError("dates not strictly increasing at row " +
                            std::to_string(t) + " (" + format_date(dates_[t]) + ")");
    }
  }
  const Eigen::Index level_cols = 1 + num_strategies_;
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index t = 0; t < T; ++t) {
      const double v = values_(t, c);
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite value at row " + std::to_string(t) +
                              ", column " + names_[static_cast<std::size_t>(c)]);
      }
      if (c < level_cols && v <= 0.0) {
        throw ValidationError("non-positive level " + std::to_string(v) +
                              " at row " + std::to_string(t) + ", column " +
                              names_[static_cast<std::size_t>(c)]);
      }
    }
  }
}

Eigen::Index PriceSeries::lower_bound(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  return static_cast<Eigen::Index>(it - dates_.begin());
}

Eigen::Index PriceSeries::last_on_or_before(Date d) const {
  auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
  return static_cast<Eigen::Index>(it - dates_.begin()) - 1;
}

PriceSeries PriceSeries::slice(Eigen::Index first, Eigen::Index last) const {
  if (first < 0 || last >= size() || first > last) {
    throw ValidationError("slice [" + std::to_string(first) + ", " +
                          std::to_string(last) + "] out of range");
  }
  std::vector<Date> d(dates_.begin() + first, dates_.begin() + last + 1);
  return PriceSeries(std::move(d), names_,
                     values_.middleRows(first, last - first + 1),
                     num_strategies_, num_context_);
}

bool PriceSeries::operator==(const PriceSeries& other) const {
  return dates_ == other.dates_ && names_ == other.names_ &&
         num_strategies_ == other.num_strategies_ &&
         num_context_ == other.num_context_ && values_ == other.values_;
}

void RegimeSpec::validate() const {
  if (names.empty()) throw ValidationError("regime spec has no columns");
  if (names.size() != segments.size()) {
    throw ValidationError("regime spec names/segments size mismatch");
  }
  if (num_context < 0 || num_context >= static_cast<Eigen::Index>(names.size())) {
    throw ValidationError("regime spec context count out of range");
  }
  Eigen::Index total = -1;
  for (std::size_t c = 0; c < segments.size(); ++c) {
    if (segments[c].empty()) {
      throw ValidationError("empty segment list for column " + names[c]);
    }
    Eigen::Index len = 0;
    for (const RegimeSegment& s : segments[c]) {
      if (s.length <= 0) throw ValidationError("segment length must be positive");
      if (s.vol < 0.0) throw ValidationError("segment vol must be nonnegative");
      len += s.length;
    }
    if (total < 0) total = len;
    if (len != total) {
      throw ValidationError("segment lengths disagree across columns (column " +
                            names[c] + ")");
    }
  }
}

Eigen::Index RegimeSpec::segment_at(Eigen::Index col, Eigen::Index t) const {
  const auto& segs = segments[static_cast<std::size_t>(col)];
  Eigen::Index end = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    end += segs[i].length;
    if (t < end) return static_cast<Eigen::Index>(i);
  }
  return static_cast<Eigen::Index>(segs.size()) - 1;
}

PriceSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  if (header.size() < 2) {
    throw ParseError("header must name a date column and at least one series");
  }
  std::vector<std::string> names(header.begin() + 1, header.end());
  const auto cols = static_cast<Eigen::Index>(names.size());

  // Context columns carry a ctx_ prefix and must be the trailing block.
  Eigen::Index num_context = 0;
  for (Eigen::Index c = cols - 1; c >= 0 && is_context_name(names[c]); --c) {
    ++num_context;
  }
  for (Eigen::Index c = 0; c < cols - num_context; ++c) {
    if (is_context_name(names[c])) {
      throw ParseError("ctx_ column '" + names[c] + "' must come after all levels");
    }
  }
  if (cols - num_context < 2) {
    throw ParseError("need a risky column and at least one strategy column");
  }

  std::vector<Date> dates;
  std::vector<double> flat;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols + 1) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(cols + 1) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Date d;
    try {
      d = parse_date(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
    if (!dates.empty() && d == dates.back()) {
      throw ValidationError("row " + std::to_string(row) + ": duplicate date " +
                            fields[0]);
    }
    dates.push_back(d);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::string& f = fields[static_cast<std::size_t>(c) + 1];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError("row " + std::to_string(row) + ": bad number '" + f +
                         "' in column " + names[static_cast<std::size_t>(c)]);
      }
      flat.push_back(v);
    }
  }
  if (dates.empty()) throw ParseError("no data rows in " + path.string());

  const auto T = static_cast<Eigen::Index>(dates.size());
  Eigen::MatrixXd values(T, cols);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index c = 0; c < cols; ++c)
      values(t, c) = flat[static_cast<std::size_t>(t * cols + c)];

  // Rows sorted by date; the constructor re-checks strict monotonicity.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) order[static_cast<std::size_t>(t)] = t;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return dates[a] < dates[b]; });
  std::vector<Date> sorted_dates(static_cast<std::size_t>(T));
  Eigen::MatrixXd sorted_values(T, cols);
  for (Eigen::Index t = 0; t < T; ++t) {
    sorted_dates[static_cast<std::size_t>(t)] =
        dates[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
    sorted_values.row(t) = values.row(order[static_cast<std::size_t>(t)]);
  }
  for (Eigen::Index t = 1; t < T; ++t) {
    if (sorted_dates[t - 1] == sorted_dates[t]) {
      throw ValidationError("duplicate date " + format_date(sorted_dates[t]));
    }
  }

  return PriceSeries(std::move(sorted_dates), std::move(names),
                     std::move(sorted_values), cols - 1 - num_context, num_context);
}

void write_csv(const PriceSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "date";
  for (const std::string& n : series.names()) out << ',' << n;
  out << '\n';
  for (Eigen::Index t = 0; t < series.size(); ++t) {
    out << format_date(series.date(t));
    for (Eigen::Index c = 0; c < series.num_columns(); ++c) {
      out << ',' << format_double(series.level(t, c));
    }
    out << '\n';
  }
}

PriceSeries synthesize(const RegimeSpec& spec) {
  spec.validate();
  const auto cols = static_cast<Eigen::Index>(spec.names.size());
  Eigen::Index total = 0;
  for (const RegimeSegment& s : spec.segments.front()) total += s.length;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd values(total, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    double level = 100.0;
    Eigen::Index t = 0;
    for (const RegimeSegment& seg : spec.segments[static_cast<std::size_t>(c)]) {
      for (Eigen::Index i = 0; i < seg.length; ++i, ++t) {
        if (t == 0) {
          values(t, c) = level;
          continue;
        }
        const double shock = seg.vol > 0.0 ? seg.vol * normal(rng) : 0.0;
        level *= 1.0 + seg.drift + shock;
        values(t, c) = level;
      }
    }
  }

  return PriceSeries(weekday_calendar(spec.start, static_cast<std::size_t>(total)),
                     spec.names, std::move(values), cols - 1 - spec.num_context,
                     spec.num_context);
}

}  // namespace hedgebot
