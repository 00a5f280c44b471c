#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hedgebot/evaluation.hpp"
#include "hedgebot/trainer.hpp"

namespace hedgebot {

// Trained allocation agent behind the common fit/decide surface. fit()
// trains on the truncated view it is given; decide() runs the
// deterministic policy day by day with the fitted normalization stats.
class DrlModel : public AllocationModel {
 public:
  DrlModel(std::string name, FeatureConfig features, NetworkConfig network,
           TrainConfig train_config, BacktestConfig backtest);

  std::string name() const override { return name_; }
  void fit(const PriceSeries& train_view) override;
  Eigen::MatrixXd decide(const PriceSeries& series, Eigen::Index begin,
                         Eigen::Index end) override;

  const std::vector<TrainResult>& fits() const { return fits_; }

  // Training curves and parameter checkpoints, one pair per fit() call.
  void write_artifacts(const std::filesystem::path& dir) const;

 private:
  std::string name_;
  FeatureConfig features_;
  NetworkConfig network_;
  TrainConfig train_config_;
  BacktestConfig backtest_;

  std::optional<Policy> policy_;
  std::optional<PolicyParams> params_;
  ContextStats stats_;
  std::vector<TrainResult> fits_;
};

}  // namespace hedgebot
