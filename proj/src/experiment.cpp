#include "hedgebot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "hedgebot/errors.hpp"
#include "hedgebot/io_util.hpp"

namespace hedgebot {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

// Raw key/value lines in file order; duplicate keys are reported later.
using KvList = std::vector<std::pair<std::string, std::string>>;

KvList read_kv_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  KvList kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(row) +
                       ": expected key = value");
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

// Typed access over the raw pairs; every problem becomes a diagnostic and
// the default survives, so validate can list all violations at once.
class ConfigReader {
 public:
  ConfigReader(KvList kv, std::vector<std::string>& diagnostics)
      : kv_(std::move(kv)), diags_(diagnostics) {
    for (std::size_t i = 0; i < kv_.size(); ++i) {
      for (std::size_t j = i + 1; j < kv_.size(); ++j) {
        if (kv_[i].first == kv_[j].first) {
          diags_.push_back("duplicate key '" + kv_[i].first + "'");
        }
      }
    }
  }

  bool has(const std::string& key) {
    for (const auto& [k, v] : kv_) {
      if (k == key) return true;
    }
    return false;
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    used_.push_back(key);
    for (const auto& [k, v] : kv_) {
      if (k == key) return v;
    }
    return fallback;
  }

  double get_double(const std::string& key, double fallback) {
    const std::string raw = get_string(key, "");
    if (raw.empty()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      diags_.push_back("key '" + key + "': bad number '" + raw + "'");
      return fallback;
    }
  }

  long get_int(const std::string& key, long fallback) {
    const std::string raw = get_string(key, "");
    if (raw.empty()) return fallback;
    try {
      std::size_t pos = 0;
      const long v = std::stol(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      diags_.push_back("key '" + key + "': bad integer '" + raw + "'");
      return fallback;
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    const std::string raw = get_string(key, "");
    if (raw.empty()) return fallback;
    if (raw == "true" || raw == "on" || raw == "1") return true;
    if (raw == "false" || raw == "off" || raw == "0") return false;
    diags_.push_back("key '" + key + "': expected true/false, got '" + raw + "'");
    return fallback;
  }

  Date get_date(const std::string& key, Date fallback) {
    const std::string raw = get_string(key, "");
    if (raw.empty()) return fallback;
    try {
      return parse_date(raw);
    } catch (const ParseError& e) {
      diags_.push_back("key '" + key + "': " + e.what());
      return fallback;
    }
  }

  std::vector<int> get_int_list(const std::string& key,
                                std::vector<int> fallback) {
    const std::string raw = get_string(key, "");
    if (raw.empty()) return fallback;
    std::vector<int> out;
    for (const std::string& item : split(raw, ',')) {
      try {
        out.push_back(std::stoi(item));
      } catch (const std::exception&) {
        diags_.push_back("key '" + key + "': bad integer list entry '" + item +
                         "'");
        return fallback;
      }
    }
    return out;
  }

  void mark_prefix_used(const std::string& prefix) {
    for (const auto& [k, v] : kv_) {
      if (k.rfind(prefix, 0) == 0) used_.push_back(k);
    }
  }

  void report_unknown_keys() {
    for (const auto& [k, v] : kv_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        diags_.push_back("unknown key '" + k + "'");
      }
    }
  }

  const KvList& raw() const { return kv_; }

 private:
  KvList kv_;
  std::vector<std::string>& diags_;
  std::vector<std::string> used_;
};

std::vector<RegimeSegment> parse_segments(const std::string& raw,
                                          const std::string& key,
                                          std::vector<std::string>& diags) {
  std::vector<RegimeSegment> out;
  for (const std::string& part : split(raw, ';')) {
    const std::vector<std::string> fields = split(part, ':');
    if (fields.size() != 3) {
      diags.push_back("key '" + key + "': segment '" + part +
                      "' is not length:drift:vol");
      continue;
    }
    try {
      RegimeSegment seg;
      seg.length = std::stol(fields[0]);
      seg.drift = std::stod(fields[1]);
      seg.vol = std::stod(fields[2]);
      out.push_back(seg);
    } catch (const std::exception&) {
      diags.push_back("key '" + key + "': bad segment numbers in '" + part + "'");
    }
  }
  return out;
}

void run_parallel(int workers, std::vector<std::function<void()>>& tasks) {
  if (workers <= 1 || tasks.size() <= 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, static_cast<int>(tasks.size()));
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void write_metrics_rows(std::ofstream& out, const std::string& model,
                        const std::string& scope, const MetricsReport& m,
                        double net) {
  out << model << ',' << scope << ',' << format_double(m.annualized_return)
      << ',' << format_double(m.sharpe) << ',' << format_double(m.sortino)
      << ',' << format_double(m.max_drawdown) << ',' << format_double(net)
      << '\n';
}

void write_path_csv(const std::vector<Date>& dates, const Eigen::VectorXd& values,
                    const Eigen::VectorXd& returns, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "date,value,daily_return\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out << format_date(dates[i]) << ',' << format_double(values(row + 1)) << ','
        << format_double(returns(row)) << '\n';
  }
}

struct ModelRunOutput {
  WalkForwardRun run;
};

// Walk one model through the schedule and drop its reports under dir.
ModelRunOutput run_and_write_model(const PriceSeries& series,
                                   const WalkForwardSchedule& schedule,
                                   AllocationModel& model,
                                   const BacktestConfig& backtest,
                                   const fs::path& dir) {
  fs::create_directories(dir);
  ModelRunOutput out;
  out.run = run_walk_forward(series, schedule, model, backtest);

  write_path_csv(out.run.dates, out.run.values, out.run.daily_returns,
                 dir / "oos_path.csv");
  write_svg_line_chart(out.run.dates, out.run.values, model.name(),
                       dir / "oos_path.svg");

  std::ofstream metrics(dir / "metrics.csv");
  if (!metrics) throw ParseError("cannot write metrics.csv");
  metrics << "model,scope,annualized_return,sharpe,sortino,max_drawdown,"
             "net_profit\n";
  for (std::size_t k = 0; k < out.run.steps.size(); ++k) {
    const auto& step = out.run.steps[k];
    write_metrics_rows(metrics, model.name(), "step_" + std::to_string(k + 1),
                       step.metrics,
                       step.backtest.values(step.backtest.values.size() - 1) -
                           1.0);
  }
  write_metrics_rows(metrics, model.name(), "overall", out.run.overall,
                     out.run.values(out.run.values.size() - 1) - 1.0);
  if (out.run.daily_returns.size() >= 2) {
    const auto three = static_cast<Eigen::Index>(3 * kTradingDaysPerYear);
    const auto five = static_cast<Eigen::Index>(5 * kTradingDaysPerYear);
    write_metrics_rows(metrics, model.name(), "trailing_3y",
                       trailing_metrics(out.run.values, three), 0.0);
    write_metrics_rows(metrics, model.name(), "trailing_5y",
                       trailing_metrics(out.run.values, five), 0.0);
  }

  if (auto* drl = dynamic_cast<DrlModel*>(&model)) {
    drl->write_artifacts(dir);
  }
  return out;
}

std::unique_ptr<AllocationModel> make_model(const std::string& name,
                                            const ExperimentSpec& spec,
                                            int follow_lookback) {
  TrainConfig tc = spec.train_config;
  if (!spec.adversarial) {
    tc.noise_std = 0.0;
    tc.explore_prob = 1.0;
  }
  if (name == "drl" || name == "drl_nocontext") {
    NetworkConfig net = spec.network;
    net.use_context = name == "drl";
    return std::make_unique<DrlModel>(name, spec.features, net, tc,
                                      spec.backtest);
  }
  if (name == "markowitz") return std::make_unique<MarkowitzModel>(spec.markowitz);
  if (name == "winner") {
    return std::make_unique<FollowWinnerModel>(follow_lookback,
                                               spec.markowitz.rebalance_period);
  }
  if (name == "loser") {
    return std::make_unique<FollowLoserModel>(follow_lookback,
                                              spec.markowitz.rebalance_period);
  }
  if (name == "risky") return std::make_unique<RiskyOnlyModel>();
  if (name == "uniform") return std::make_unique<UniformModel>();
  throw ValidationError("unknown model '" + name + "'");
}

const std::vector<std::string> kKnownModels = {
    "drl", "drl_nocontext", "markowitz", "winner", "loser", "risky", "uniform"};

}  // namespace

PriceSeries make_signal_series(const SignalSeriesSpec& spec) {
  if (spec.days < 10) throw ValidationError("signal series needs >= 10 days");
  if (spec.strategies < 2) throw ValidationError("signal series needs >= 2 strategies");
  if (spec.marker_horizon < 1 || spec.context_horizon < 1) {
    throw ValidationError("signal horizons must be >= 1");
  }
  const Eigen::Index T = spec.days;
  const Eigen::Index l = spec.strategies;

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, l - 1);
  // winner_of[u] pays `payoff` on day u (returns exist for u >= 1).
  std::vector<Eigen::Index> winner_of(static_cast<std::size_t>(T), 0);
  for (Eigen::Index u = 1; u < T; ++u) {
    winner_of[static_cast<std::size_t>(u)] = pick(rng);
  }

  std::vector<std::string> names;
  names.push_back("risky");
  for (Eigen::Index k = 0; k < l; ++k) {
    names.push_back("strat_" + std::to_string(k + 1));
  }
  if (spec.context_column) names.push_back("ctx_signal");

  const Eigen::Index cols = 1 + l + (spec.context_column ? 1 : 0);
  Eigen::MatrixXd values(T, cols);
  values.row(0).setConstant(100.0);

  for (Eigen::Index u = 1; u < T; ++u) {
    const double risky_ret = (u % 2 == 1) ? spec.risky_amplitude
                                          : -spec.risky_amplitude;
    values(u, 0) = values(u - 1, 0) * (1.0 + risky_ret);
    for (Eigen::Index k = 0; k < l; ++k) {
      double r = 0.0;
      if (winner_of[static_cast<std::size_t>(u)] == k) r += spec.payoff;
      const Eigen::Index ahead = u + spec.marker_horizon;
      if (spec.marker != 0.0 && ahead < T &&
          winner_of[static_cast<std::size_t>(ahead)] == k) {
        r += spec.marker;
      }
      values(u, 1 + k) = values(u - 1, 1 + k) * (1.0 + r);
    }
  }
  if (spec.context_column) {
    for (Eigen::Index u = 0; u < T; ++u) {
      const Eigen::Index ahead = std::min<Eigen::Index>(u + spec.context_horizon,
                                                        T - 1);
      values(u, cols - 1) =
          static_cast<double>(winner_of[static_cast<std::size_t>(ahead)]);
    }
  }

  return PriceSeries(weekday_calendar(spec.start, static_cast<std::size_t>(T)),
                     std::move(names), std::move(values), l,
                     spec.context_column ? 1 : 0);
}

ExperimentSpec parse_experiment_file(const fs::path& path,
                                     std::vector<std::string>& diagnostics) {
  ConfigReader reader(read_kv_file(path), diagnostics);
  ExperimentSpec spec;

  spec.seed = static_cast<std::uint64_t>(reader.get_int("seed", 12345));

  // --- data source ---
  int sources = 0;
  if (reader.has("data_csv")) {
    spec.source = DataSource::kCsv;
    spec.data_csv = reader.get_string("data_csv", "");
    ++sources;
  }
  if (reader.has("columns")) {
    spec.source = DataSource::kSegments;
    ++sources;
    spec.regime.names = split(reader.get_string("columns", ""), ',');
    spec.regime.seed =
        static_cast<std::uint64_t>(reader.get_int("synthetic_seed",
                                                  static_cast<long>(spec.seed)));
    spec.regime.start =
        reader.get_date("synthetic_start", parse_date("2000-01-03"));
    Eigen::Index num_context = 0;
    for (const std::string& name : spec.regime.names) {
      const std::string key = "segments_" + name;
      if (!reader.has(key)) {
        diagnostics.push_back("missing key '" + key + "' for column " + name);
        spec.regime.segments.push_back({{1, 0.0, 0.0}});
      } else {
        spec.regime.segments.push_back(
            parse_segments(reader.get_string(key, ""), key, diagnostics));
      }
      if (name.rfind("ctx_", 0) == 0) ++num_context;
    }
    spec.regime.num_context = num_context;
  } else {
    reader.get_string("synthetic_seed", "");
    reader.get_string("synthetic_start", "");
  }
  reader.mark_prefix_used("segments_");
  if (reader.get_bool("signal_data", false)) {
    spec.source = DataSource::kSignal;
    ++sources;
  }
  spec.signal.days = reader.get_int("signal_days", 700);
  spec.signal.strategies = reader.get_int("signal_strategies", 2);
  spec.signal.payoff = reader.get_double("signal_payoff", 0.03);
  spec.signal.marker = reader.get_double("signal_marker", 0.01);
  spec.signal.marker_horizon =
      static_cast<int>(reader.get_int("signal_marker_horizon", 1));
  spec.signal.context_column = reader.get_bool("signal_context", true);
  spec.signal.context_horizon =
      static_cast<int>(reader.get_int("signal_context_horizon", 1));
  spec.signal.risky_amplitude = reader.get_double("signal_risky_amplitude", 0.003);
  spec.signal.seed = static_cast<std::uint64_t>(
      reader.get_int("signal_seed", static_cast<long>(spec.seed)));
  spec.signal.start = reader.get_date("signal_start", parse_date("2000-01-03"));
  if (sources == 0) {
    diagnostics.push_back("no data source: set data_csv, columns or signal_data");
  } else if (sources > 1) {
    diagnostics.push_back("more than one data source configured");
  }

  // --- models ---
  const std::string models_raw = reader.get_string("models", "");
  if (!models_raw.empty()) spec.models = split(models_raw, ',');
  spec.ablation = reader.get_bool("ablation", false);
  for (const std::string& m : spec.models) {
    if (std::find(kKnownModels.begin(), kKnownModels.end(), m) ==
        kKnownModels.end()) {
      diagnostics.push_back("unknown model '" + m + "'");
    }
  }
  if (spec.models.empty() && !spec.ablation) {
    diagnostics.push_back("no models requested and ablation disabled");
  }

  // --- schedule ---
  const std::string mode = reader.get_string("schedule", "extending");
  if (mode == "extending") {
    spec.schedule_mode = ScheduleMode::kExtending;
  } else if (mode == "sliding") {
    spec.schedule_mode = ScheduleMode::kSliding;
  } else {
    diagnostics.push_back("schedule must be extending or sliding");
  }
  spec.first_train_end =
      reader.get_date("first_train_end", parse_date("2006-12-31"));
  spec.test_span_days = static_cast<int>(reader.get_int("test_span_days", 365));
  if (spec.test_span_days < 1) diagnostics.push_back("test_span_days must be >= 1");

  // --- features ---
  try {
    spec.features.asset_lags =
        LagSet(reader.get_int_list("asset_lags", {60, 20, 4, 3, 2, 1, 0}));
  } catch (const ValidationError& e) {
    diagnostics.push_back(std::string("asset_lags: ") + e.what());
  }
  try {
    spec.features.context_lags =
        LagSet(reader.get_int_list("context_lags", {60, 20, 4, 3, 2, 1, 0}));
  } catch (const ValidationError& e) {
    diagnostics.push_back(std::string("context_lags: ") + e.what());
  }
  spec.features.vol_window = static_cast<int>(reader.get_int("vol_window", 20));
  if (spec.features.vol_window < 1) {
    diagnostics.push_back("vol_window must be >= 1");
  }

  // --- network ---
  const std::string net = reader.get_string("network", "cnn");
  if (net == "cnn") {
    spec.network.variant = NetworkVariant::kConv;
  } else if (net == "lstm" || net == "recurrent") {
    spec.network.variant = NetworkVariant::kRecurrent;
  } else {
    diagnostics.push_back("network must be cnn or lstm");
  }
  spec.network.use_context = reader.get_bool("use_context", true);
  spec.network.subnet1_channels =
      reader.get_int_list("subnet1_channels", {5, 10});
  spec.network.subnet1_strides = reader.get_int_list("subnet1_strides", {2, 1});
  spec.network.subnet1_kernel =
      static_cast<int>(reader.get_int("subnet1_kernel", 3));
  spec.network.subnet2_channels = reader.get_int_list("subnet2_channels", {2});
  spec.network.subnet2_kernel =
      static_cast<int>(reader.get_int("subnet2_kernel", 3));
  spec.network.subnet1_hidden =
      static_cast<int>(reader.get_int("subnet1_hidden", 10));
  spec.network.subnet2_hidden =
      static_cast<int>(reader.get_int("subnet2_hidden", 2));
  spec.network.merge_width = static_cast<int>(reader.get_int("merge_width", 32));

  // --- training ---
  const std::string reward_name = reader.get_string("reward", "net_profit");
  if (reward_name == "net_profit") {
    spec.train_config.reward_kind = RewardKind::kNetProfit;
  } else if (reward_name == "sortino") {
    spec.train_config.reward_kind = RewardKind::kSortino;
  } else {
    diagnostics.push_back("reward must be net_profit or sortino");
  }
  spec.train_config.learning_rate = reader.get_double("learning_rate", 0.01);
  spec.train_config.batch_size =
      static_cast<int>(reader.get_int("batch_size", 50));
  spec.train_config.episode_days =
      static_cast<int>(reader.get_int("episode_days", 0));
  spec.train_config.l2_coeff = reader.get_double("l2_coeff", 1e-8);
  spec.train_config.noise_std = reader.get_double("noise_std", 0.002);
  spec.train_config.explore_prob = reader.get_double("explore_prob", 0.9);
  spec.train_config.max_iterations =
      static_cast<int>(reader.get_int("max_iterations", 500));
  spec.train_config.early_stop_patience =
      static_cast<int>(reader.get_int("early_stop", 50));
  spec.train_config.seed = spec.seed;
  spec.adversarial = reader.get_bool("adversarial", true);

  // --- backtest ---
  spec.backtest.commission = reader.get_double("commission", 0.0030);
  const long lag = reader.get_int("action_lag", 1);
  if (lag != 0 && lag != 1) {
    diagnostics.push_back("action_lag must be 0 or 1");
  } else {
    spec.backtest.action_lag = static_cast<int>(lag);
  }
  spec.backtest.overlay_budget = reader.get_double("overlay_budget", 1.0);

  // --- markowitz / heuristics ---
  spec.markowitz.lookback =
      static_cast<int>(reader.get_int("markowitz_lookback", 250));
  spec.markowitz.rebalance_period =
      static_cast<int>(reader.get_int("rebalance_period", 126));
  spec.follow_lookback = static_cast<int>(reader.get_int("follow_lookback", 250));

  reader.report_unknown_keys();
  for (const std::string& more : validate_spec(spec)) {
    if (std::find(diagnostics.begin(), diagnostics.end(), more) ==
        diagnostics.end()) {
      diagnostics.push_back(more);
    }
  }
  return spec;
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> diags;
  if (spec.source == DataSource::kNone) diags.push_back("no data source");
  if (spec.models.empty() && !spec.ablation) {
    diags.push_back("no models requested and ablation disabled");
  }
  try {
    spec.train_config.validate();
  } catch (const ValidationError& e) {
    diags.push_back(e.what());
  }
  try {
    spec.backtest.validate();
  } catch (const ValidationError& e) {
    diags.push_back(e.what());
  }
  try {
    spec.markowitz.validate();
  } catch (const ValidationError& e) {
    diags.push_back(e.what());
  }
  if (spec.source == DataSource::kSegments) {
    try {
      spec.regime.validate();
    } catch (const ValidationError& e) {
      diags.push_back(e.what());
    }
  }
  if (spec.test_span_days < 1) diags.push_back("test_span_days must be >= 1");
  return diags;
}

PriceSeries make_series(const ExperimentSpec& spec) {
  switch (spec.source) {
    case DataSource::kCsv:
      return load_csv(spec.data_csv);
    case DataSource::kSegments:
      return synthesize(spec.regime);
    case DataSource::kSignal:
      return make_signal_series(spec.signal);
    case DataSource::kNone:
      break;
  }
  throw ValidationError("no data source configured");
}

std::string AblationRow::cell_id() const {
  return reward + "_" + network + (adversarial ? "_adv" : "_noadv") +
         (context ? "_ctx" : "_noctx") + "_lag" + std::to_string(lag);
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const fs::path& out_dir, int workers) {
  const std::vector<std::string> problems = validate_spec(spec);
  if (!problems.empty()) {
    std::string joined;
    for (const std::string& p : problems) joined += p + "; ";
    throw ValidationError("invalid experiment spec: " + joined);
  }
  fs::create_directories(out_dir);

  const PriceSeries series = make_series(spec);
  const WalkForwardSchedule schedule = build_schedule(
      series, spec.schedule_mode, spec.first_train_end, spec.test_span_days);

  ExperimentResult result;
  result.model_names = spec.models;

  // --- named models ---
  std::vector<ModelRunOutput> model_runs(spec.models.size());
  {
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < spec.models.size(); ++i) {
      tasks.push_back([&, i] {
        auto model = make_model(spec.models[i], spec, spec.follow_lookback);
        model_runs[i] = run_and_write_model(series, schedule, *model,
                                            spec.backtest,
                                            out_dir / spec.models[i]);
      });
    }
    run_parallel(workers, tasks);
  }
  if (!spec.models.empty()) {
    std::ofstream summary(out_dir / "summary_metrics.csv");
    if (!summary) throw ParseError("cannot write summary_metrics.csv");
    summary << "model,scope,annualized_return,sharpe,sortino,max_drawdown,"
               "net_profit\n";
    for (std::size_t i = 0; i < spec.models.size(); ++i) {
      const WalkForwardRun& run = model_runs[i].run;
      for (std::size_t k = 0; k < run.steps.size(); ++k) {
        const auto& step = run.steps[k];
        write_metrics_rows(
            summary, spec.models[i], "step_" + std::to_string(k + 1),
            step.metrics,
            step.backtest.values(step.backtest.values.size() - 1) - 1.0);
      }
      write_metrics_rows(summary, spec.models[i], "overall", run.overall,
                         run.values(run.values.size() - 1) - 1.0);
    }
  }

  // --- ablation matrix: reward x network x adversarial x context x lag ---
  if (spec.ablation) {
    struct Cell {
      std::string reward;
      std::string network;
      bool adversarial;
      bool context;
      int lag;
    };
    std::vector<Cell> cells;
    for (const std::string& reward_name : {"net_profit", "sortino"}) {
      for (const std::string& net_name : {"cnn", "lstm"}) {
        for (bool adv : {true, false}) {
          for (bool ctx : {true, false}) {
            for (int lag : {1, 0}) {
              cells.push_back({reward_name, net_name, adv, ctx, lag});
            }
          }
        }
      }
    }

    std::vector<AblationRow> rows(cells.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      tasks.push_back([&, i] {
        const Cell& cell = cells[i];
        AblationRow row;
        row.reward = cell.reward;
        row.network = cell.network;
        row.adversarial = cell.adversarial;
        row.context = cell.context;
        row.lag = cell.lag;

        TrainConfig tc = spec.train_config;
        tc.reward_kind = cell.reward == "net_profit" ? RewardKind::kNetProfit
                                                     : RewardKind::kSortino;
        if (!cell.adversarial) {
          tc.noise_std = 0.0;
          tc.explore_prob = 1.0;
        }
        NetworkConfig net = spec.network;
        net.variant = cell.network == "cnn" ? NetworkVariant::kConv
                                            : NetworkVariant::kRecurrent;
        net.use_context = cell.context;
        BacktestConfig bt = spec.backtest;
        bt.action_lag = cell.lag;

        DrlModel model(row.cell_id(), spec.features, net, tc, bt);
        const ModelRunOutput out = run_and_write_model(
            series, schedule, model, bt, out_dir / "ablation" / row.cell_id());
        row.performance = out.run.values(out.run.values.size() - 1) - 1.0;
        row.metrics = out.run.overall;
        rows[i] = row;
      });
    }
    run_parallel(workers, tasks);

    // Impact columns are plain cell differences.
    auto find_perf = [&](const std::string& reward_name,
                         const std::string& net_name, bool adv, bool ctx,
                         int lag) {
      for (const AblationRow& r : rows) {
        if (r.reward == reward_name && r.network == net_name &&
            r.adversarial == adv && r.context == ctx && r.lag == lag) {
          return r.performance;
        }
      }
      throw StateError("missing ablation cell");
    };
    for (AblationRow& r : rows) {
      r.lag_impact = find_perf(r.reward, r.network, r.adversarial, r.context, 1) -
                     find_perf(r.reward, r.network, r.adversarial, r.context, 0);
      r.context_impact =
          find_perf(r.reward, r.network, r.adversarial, true, r.lag) -
          find_perf(r.reward, r.network, r.adversarial, false, r.lag);
    }

    std::ofstream table(out_dir / "ablation_summary.csv");
    if (!table) throw ParseError("cannot write ablation_summary.csv");
    table << "reward,network,adversarial,context,lag,performance,"
             "annualized_return,sharpe,sortino,max_drawdown,lag_impact,"
             "context_impact\n";
    for (const AblationRow& r : rows) {
      table << r.reward << ',' << r.network << ',' << (r.adversarial ? "yes" : "no")
            << ',' << (r.context ? "yes" : "no") << ',' << r.lag << ','
            << format_double(r.performance) << ','
            << format_double(r.metrics.annualized_return) << ','
            << format_double(r.metrics.sharpe) << ','
            << format_double(r.metrics.sortino) << ','
            << format_double(r.metrics.max_drawdown) << ','
            << format_double(r.lag_impact) << ','
            << format_double(r.context_impact) << '\n';
    }
    result.ablation_rows = rows;
  }

  return result;
}

void write_svg_line_chart(const std::vector<Date>& dates,
                          const Eigen::VectorXd& values,
                          const std::string& title, const fs::path& path) {
  if (dates.empty() || values.size() < 2) {
    throw ValidationError("nothing to plot");
  }
  const double width = 800.0, height = 400.0, margin = 50.0;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  const auto n = values.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = margin + (width - 2 * margin) *
                                  static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    const double y = height - margin -
                     (height - 2 * margin) * (values(i) - lo) / span;
    out << format_double(x) << ',' << format_double(y) << ' ';
  }
  out << "\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 20
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_date(dates.front()) << "</text>\n";
  out << "<text x=\"" << width - margin - 70 << "\" y=\"" << height - margin + 20
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_date(dates.back()) << "</text>\n";
  out << "<text x=\"4\" y=\"" << height - margin
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(lo)
      << "</text>\n";
  out << "<text x=\"4\" y=\"" << margin
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(hi)
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace hedgebot
