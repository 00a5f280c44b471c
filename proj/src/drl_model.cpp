#include "hedgebot/drl_model.hpp"

#include "hedgebot/errors.hpp"

namespace hedgebot {

DrlModel::DrlModel(std::string name, FeatureConfig features,
                   NetworkConfig network, TrainConfig train_config,
                   BacktestConfig backtest)
    : name_(std::move(name)),
      features_(std::move(features)),
      network_(std::move(network)),
      train_config_(train_config),
      backtest_(backtest) {}

void DrlModel::fit(const PriceSeries& train_view) {
  network_.num_strategies = static_cast<int>(train_view.num_strategies());
  const ObservationShape shape = ObservationShape::of(train_view, features_);
  policy_.emplace(network_, shape);

  const IndexRange window{0, train_view.size() - 1};
  TrainResult result =
      train(*policy_, train_view, window, features_, backtest_, train_config_);
  params_ = result.params;
  stats_ = compute_context_stats(train_view, window.begin, window.end);
  fits_.push_back(std::move(result));
}

Eigen::MatrixXd DrlModel::decide(const PriceSeries& series, Eigen::Index begin,
                                 Eigen::Index end) {
  if (!policy_ || !params_) throw StateError("decide before fit");
  Eigen::MatrixXd weights(end - begin + 1, series.num_strategies());
  for (Eigen::Index t = begin; t <= end; ++t) {
    const Observation obs = build_observation(series, t, features_, stats_);
    weights.row(t - begin) = policy_->forward(*params_, obs);
  }
  return weights;
}

void DrlModel::write_artifacts(const std::filesystem::path& dir) const {
  for (std::size_t k = 0; k < fits_.size(); ++k) {
    const std::string tag = "step" + std::to_string(k + 1);
    fits_[k].curve.write_csv(dir / ("train_curve_" + tag + ".csv"));
    if (policy_) {
      policy_->save_params(fits_[k].params, dir / ("policy_" + tag + ".txt"));
    }
  }
}

}  // namespace hedgebot
