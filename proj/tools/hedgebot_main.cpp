#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "hedgebot/errors.hpp"
#include "hedgebot/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kRuntimeFailure = 2;

int load_spec(const std::string& config_path, hedgebot::ExperimentSpec& spec,
              bool print) {
  std::vector<std::string> diagnostics;
  try {
    spec = hedgebot::parse_experiment_file(config_path, diagnostics);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidationFailure;
  }
  if (!diagnostics.empty()) {
    for (const std::string& d : diagnostics) {
      std::fprintf(stderr, "invalid: %s\n", d.c_str());
    }
    return kValidationFailure;
  }
  if (print) std::printf("config ok\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hedging-overlay allocation engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string out_csv;
  int workers = 1;
  long long seed_override = -1;

  CLI::App* run = app.add_subcommand("run", "run the experiment in a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--workers", workers, "concurrent model/cell workers");
  run->add_option("--seed", seed_override, "override the config seed");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config without executing");
  validate->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* synth = app.add_subcommand(
      "synthesize", "write the config's synthetic series as CSV");
  synth->add_option("--config", config_path, "experiment config file")->required();
  synth->add_option("--out", out_csv, "output CSV path")->required();
  synth->add_option("--seed", seed_override, "override the config seed");

  CLI11_PARSE(app, argc, argv);

  hedgebot::ExperimentSpec spec;

  if (validate->parsed()) {
    return load_spec(config_path, spec, true);
  }

  if (synth->parsed()) {
    const int rc = load_spec(config_path, spec, false);
    if (rc != kOk) return rc;
    if (spec.source == hedgebot::DataSource::kCsv) {
      std::fprintf(stderr, "error: config reads a CSV, nothing to synthesize\n");
      return kValidationFailure;
    }
    try {
      if (seed_override >= 0) {
        spec.regime.seed = static_cast<std::uint64_t>(seed_override);
        spec.signal.seed = static_cast<std::uint64_t>(seed_override);
      }
      hedgebot::write_csv(hedgebot::make_series(spec), out_csv);
      std::printf("wrote %s\n", out_csv.c_str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kRuntimeFailure;
    }
    return kOk;
  }

  // run
  const int rc = load_spec(config_path, spec, false);
  if (rc != kOk) return rc;
  if (seed_override >= 0) {
    spec.seed = static_cast<std::uint64_t>(seed_override);
    spec.train_config.seed = spec.seed;
    spec.regime.seed = spec.seed;
    spec.signal.seed = spec.seed;
  }
  try {
    hedgebot::run_experiment(spec, out_dir, workers);
    std::printf("done: artifacts in %s\n", out_dir.c_str());
  } catch (const hedgebot::ValidationError& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeFailure;
  }
  return kOk;
}
