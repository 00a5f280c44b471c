#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hedgebot/features.hpp"

namespace hedgebot {

enum class NetworkVariant { kConv, kRecurrent };

struct NetworkConfig {
  NetworkVariant variant = NetworkVariant::kConv;
  bool use_context = true;
  std::vector<int> subnet1_channels = {5, 10};
  std::vector<int> subnet1_strides = {2, 1};
  int subnet1_kernel = 3;
  std::vector<int> subnet2_channels = {2};
  int subnet2_kernel = 3;
  int subnet1_hidden = 10;  // recurrent cell sizes mirror the channel counts
  int subnet2_hidden = 2;
  int merge_width = 32;
  int num_strategies = 0;

  void validate() const;
};

struct ObservationShape {
  Eigen::Index strategies = 0;    // m
  Eigen::Index asset_lags = 0;    // j
  Eigen::Index context_rows = 0;  // p + 3
  Eigen::Index context_lags = 0;  // j_c

  static ObservationShape of(const PriceSeries& series, const FeatureConfig& fc);
};

// One named slice of the flat parameter vector.
struct ParamBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index fan_in = 0;
  bool bias = false;

  Eigen::Index size() const { return rows * cols; }
};

// All trainable weights, flat for the optimizer plus the block map that
// makes each entry addressable by (layer, index).
struct PolicyParams {
  Eigen::VectorXd values;
  std::vector<ParamBlock> layout;
};

// Activations recorded by forward_cached, consumed once by backward.
struct ForwardCache {
  // conv stacks: acts[layer] holds the per-channel maps entering that layer,
  // acts.back() the final maps.
  std::vector<std::vector<Eigen::MatrixXd>> s1_acts;
  std::vector<std::vector<Eigen::MatrixXd>> s2_acts;
  // recurrent cells: per-step inputs, hidden states (incl. h0) and gates.
  Eigen::MatrixXd s1_x, s1_h, s1_z, s1_r, s1_c;
  Eigen::MatrixXd s2_x, s2_h, s2_z, s2_r, s2_c;
  Eigen::VectorXd merged;  // dense input
  Eigen::VectorXd hidden;  // post-activation
  Eigen::VectorXd output;  // softmax weights
};

// Allocation policy: Observation -> simplex weights over l strategies.
// Forward is pure; backward consumes caches produced by forward_cached on
// the same parameter vector.
class Policy {
 public:
  Policy(NetworkConfig config, ObservationShape shape);

  const NetworkConfig& config() const { return config_; }
  const ObservationShape& shape() const { return shape_; }
  const std::vector<ParamBlock>& layout() const { return layout_; }
  Eigen::Index num_params() const { return total_params_; }

  // Zero-mean uniform weights scaled by 1/sqrt(fan_in); zero biases.
  PolicyParams init_params(std::uint64_t seed) const;

  Eigen::VectorXd forward(const PolicyParams& params, const Observation& obs) const;
  ForwardCache forward_cached(const PolicyParams& params,
                              const Observation& obs) const;

  // Accumulated dJ/dtheta for a sequence of steps; d_output.row(i) is
  // dJ/d(softmax output) for caches[i].
  Eigen::VectorXd backward(const PolicyParams& params,
                           const std::vector<ForwardCache>& caches,
                           const Eigen::MatrixXd& d_output) const;

  void save_params(const PolicyParams& params,
                   const std::filesystem::path& path) const;
  PolicyParams load_params(const std::filesystem::path& path) const;

 private:
  void build_layout();
  ForwardCache run_forward(const Eigen::VectorXd& theta,
                           const Observation& obs) const;
  void check_obs(const Observation& obs) const;
  void check_params(const PolicyParams& params) const;

  Eigen::Index block_index(const std::string& name) const;
  Eigen::Map<const Eigen::MatrixXd> mat(const Eigen::VectorXd& theta,
                                        Eigen::Index block) const;
  Eigen::Map<Eigen::MatrixXd> mat(Eigen::VectorXd& theta,
                                  Eigen::Index block) const;

  NetworkConfig config_;
  ObservationShape shape_;
  std::vector<ParamBlock> layout_;
  Eigen::Index total_params_ = 0;

  std::vector<Eigen::Index> s1_widths_;  // conv feature-map widths per layer
  std::vector<Eigen::Index> s2_widths_;
  Eigen::Index merged_size_ = 0;
};

}  // namespace hedgebot
