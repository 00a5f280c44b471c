#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hedgebot/baselines.hpp"
#include "hedgebot/drl_model.hpp"
#include "hedgebot/evaluation.hpp"
#include "hedgebot/price_series.hpp"
#include "hedgebot/trainer.hpp"

namespace hedgebot {

// Synthetic set where each day one strategy pays `payoff`; the coming
// winner is telegraphed `marker_horizon` days early by a small extra
// return, and a context column carries the winner index `context_horizon`
// days ahead. The risky leg alternates +/- amplitude so downside risk
// never vanishes.
struct SignalSeriesSpec {
  Eigen::Index days = 700;
  Eigen::Index strategies = 2;
  double payoff = 0.03;
  double marker = 0.01;  // 0 disables the in-returns marker
  int marker_horizon = 1;
  bool context_column = true;
  int context_horizon = 1;
  double risky_amplitude = 0.003;
  std::uint64_t seed = 12345;
  Date start = parse_date("2000-01-03");
};

PriceSeries make_signal_series(const SignalSeriesSpec& spec);

enum class DataSource { kNone, kCsv, kSegments, kSignal };

struct ExperimentSpec {
  DataSource source = DataSource::kNone;
  std::filesystem::path data_csv;
  RegimeSpec regime;
  SignalSeriesSpec signal;

  std::vector<std::string> models;  // drl, drl_nocontext, markowitz, winner,
                                    // loser, risky, uniform
  bool ablation = false;

  ScheduleMode schedule_mode = ScheduleMode::kExtending;
  Date first_train_end = parse_date("2006-12-31");
  int test_span_days = 365;

  FeatureConfig features;
  NetworkConfig network;
  TrainConfig train_config;
  BacktestConfig backtest;
  MarkowitzConfig markowitz;
  int follow_lookback = 250;
  bool adversarial = true;
  std::uint64_t seed = 12345;
};

// key = value lines, '#' comments. Throws ParseError only on unreadable
// files or malformed lines; every semantic problem lands in diagnostics.
ExperimentSpec parse_experiment_file(const std::filesystem::path& path,
                                     std::vector<std::string>& diagnostics);

// Re-checks a built spec; returns every violation found.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

PriceSeries make_series(const ExperimentSpec& spec);

struct AblationRow {
  std::string reward;
  std::string network;
  bool adversarial = false;
  bool context = false;
  int lag = 1;
  double performance = 0.0;  // out-of-sample net profit
  MetricsReport metrics;
  double lag_impact = 0.0;
  double context_impact = 0.0;

  std::string cell_id() const;
};

struct ExperimentResult {
  std::vector<std::string> model_names;
  std::vector<AblationRow> ablation_rows;
};

// Runs every requested model (and the 2^5 ablation matrix when enabled)
// through the walk-forward harness and writes all report files under
// `out_dir`. Deterministic for a fixed spec; cells may run on `workers`
// threads.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir,
                                int workers);

void write_svg_line_chart(const std::vector<Date>& dates,
                          const Eigen::VectorXd& values,
                          const std::string& title,
                          const std::filesystem::path& path);

}  // namespace hedgebot
