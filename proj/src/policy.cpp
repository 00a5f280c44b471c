#include "hedgebot/policy.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hedgebot/errors.hpp"
#include "hedgebot/io_util.hpp"

namespace hedgebot {

namespace {

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits) {
  const double shift = logits.maxCoeff();
  const Eigen::ArrayXd e = (logits.array() - shift).exp();
  return (e / e.sum()).matrix();
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void NetworkConfig::validate() const {
  if (num_strategies < 2) throw ValidationError("policy needs l >= 2 strategies");
  if (merge_width < 1) throw ValidationError("merge width must be >= 1");
  if (variant == NetworkVariant::kConv) {
    if (subnet1_channels.empty()) throw ValidationError("subnet 1 has no layers");
    if (subnet1_strides.size() != subnet1_channels.size()) {
      throw ValidationError("subnet 1 needs one stride per conv layer");
    }
    for (int c : subnet1_channels)
      if (c < 1) throw ValidationError("conv channels must be positive");
    for (int s : subnet1_strides)
      if (s < 1) throw ValidationError("strides must be positive");
    if (subnet1_kernel < 1 || subnet2_kernel < 1) {
      throw ValidationError("kernel sizes must be positive");
    }
    if (use_context) {
      if (subnet2_channels.empty()) throw ValidationError("subnet 2 has no layers");
      for (int c : subnet2_channels)
        if (c < 1) throw ValidationError("conv channels must be positive");
    }
  } else {
    if (subnet1_hidden < 1 || (use_context && subnet2_hidden < 1)) {
      throw ValidationError("recurrent hidden sizes must be positive");
    }
  }
}

ObservationShape ObservationShape::of(const PriceSeries& series,
                                      const FeatureConfig& fc) {
  ObservationShape s;
  s.strategies = series.num_strategies();
  s.asset_lags = fc.asset_lags.size();
  s.context_rows = series.num_context() + 3;
  s.context_lags = fc.context_lags.size();
  return s;
}

Policy::Policy(NetworkConfig config, ObservationShape shape)
    : config_(std::move(config)), shape_(shape) {
  config_.validate();
  if (shape_.strategies < 1) throw ValidationError("observation has no strategies");

  if (config_.variant == NetworkVariant::kConv) {
    Eigen::Index w = shape_.asset_lags;
    for (std::size_t c = 0; c < config_.subnet1_channels.size(); ++c) {
      if (w < config_.subnet1_kernel) {
        throw ValidationError("asset lag grid too short for subnet-1 kernels");
      }
      w = (w - config_.subnet1_kernel) / config_.subnet1_strides[c] + 1;
      s1_widths_.push_back(w);
    }
    if (config_.use_context) {
      Eigen::Index wc = shape_.context_lags;
      for (std::size_t c = 0; c < config_.subnet2_channels.size(); ++c) {
        if (wc < config_.subnet2_kernel) {
          throw ValidationError("context lag grid too short for subnet-2 kernels");
        }
        wc = wc - config_.subnet2_kernel + 1;
        s2_widths_.push_back(wc);
      }
    }
    merged_size_ = config_.subnet1_channels.back() * shape_.strategies *
                   s1_widths_.back();
    if (config_.use_context) {
      merged_size_ += config_.subnet2_channels.back() * s2_widths_.back();
    }
  } else {
    merged_size_ = config_.subnet1_hidden;
    if (config_.use_context) merged_size_ += config_.subnet2_hidden;
  }

  build_layout();
}

void Policy::build_layout() {
  auto add = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols,
                 Eigen::Index fan_in, bool bias) {
    layout_.push_back({name, total_params_, rows, cols, fan_in, bias});
    total_params_ += rows * cols;
  };

  if (config_.variant == NetworkVariant::kConv) {
    Eigen::Index in_ch = 2;
    for (std::size_t c = 0; c < config_.subnet1_channels.size(); ++c) {
      const Eigen::Index out_ch = config_.subnet1_channels[c];
      const Eigen::Index k = config_.subnet1_kernel;
      const std::string base = "s1.conv" + std::to_string(c + 1);
      add(base + ".w", out_ch, in_ch * k, in_ch * k, false);
      add(base + ".b", out_ch, 1, in_ch * k, true);
      in_ch = out_ch;
    }
    if (config_.use_context) {
      Eigen::Index cin = shape_.context_rows;
      for (std::size_t c = 0; c < config_.subnet2_channels.size(); ++c) {
        const Eigen::Index out_ch = config_.subnet2_channels[c];
        const Eigen::Index k = config_.subnet2_kernel;
        const std::string base = "s2.conv" + std::to_string(c + 1);
        add(base + ".w", out_ch, cin * k, cin * k, false);
        add(base + ".b", out_ch, 1, cin * k, true);
        cin = out_ch;
      }
    }
  } else {
    auto add_gru = [&](const std::string& base, Eigen::Index input,
                       Eigen::Index hidden) {
      for (const char* gate : {"z", "r", "c"}) {
        add(base + ".w" + gate, hidden, input, input, false);
        add(base + ".u" + gate, hidden, hidden, hidden, false);
        add(base + ".b" + gate, hidden, 1, input, true);
      }
    };
    add_gru("s1.gru", 2 * shape_.strategies, config_.subnet1_hidden);
    if (config_.use_context) {
      add_gru("s2.gru", shape_.context_rows, config_.subnet2_hidden);
    }
  }

  add("merge.w", config_.merge_width, merged_size_, merged_size_, false);
  add("merge.b", config_.merge_width, 1, merged_size_, true);
  add("out.w", config_.num_strategies, config_.merge_width, config_.merge_width,
      false);
  add("out.b", config_.num_strategies, 1, config_.merge_width, true);
}

Eigen::Index Policy::block_index(const std::string& name) const {
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].name == name) return static_cast<Eigen::Index>(i);
  }
  throw StateError("unknown parameter block " + name);
}

Eigen::Map<const Eigen::MatrixXd> Policy::mat(const Eigen::VectorXd& theta,
                                              Eigen::Index block) const {
  const ParamBlock& b = layout_[static_cast<std::size_t>(block)];
  return {theta.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<Eigen::MatrixXd> Policy::mat(Eigen::VectorXd& theta,
                                        Eigen::Index block) const {
  const ParamBlock& b = layout_[static_cast<std::size_t>(block)];
  return {theta.data() + b.offset, b.rows, b.cols};
}

PolicyParams Policy::init_params(std::uint64_t seed) const {
  PolicyParams params;
  params.values = Eigen::VectorXd::Zero(total_params_);
  params.layout = layout_;
  std::mt19937_64 rng(seed);
  for (const ParamBlock& b : layout_) {
    if (b.bias) continue;
    const double scale = 1.0 / std::sqrt(static_cast<double>(b.fan_in));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      params.values(b.offset + i) = dist(rng);
    }
  }
  return params;
}

void Policy::check_obs(const Observation& obs) const {
  if (obs.returns.rows() != shape_.strategies ||
      obs.returns.cols() != shape_.asset_lags ||
      obs.vols.rows() != shape_.strategies ||
      obs.vols.cols() != shape_.asset_lags) {
    throw ValidationError("observation asset layers do not match the network");
  }
  if (config_.use_context && (obs.context.rows() != shape_.context_rows ||
                              obs.context.cols() != shape_.context_lags)) {
    throw ValidationError("observation context does not match the network");
  }
}

void Policy::check_params(const PolicyParams& params) const {
  if (params.values.size() != total_params_) {
    throw ValidationError("parameter vector has wrong length");
  }
}

ForwardCache Policy::run_forward(const Eigen::VectorXd& theta,
                                 const Observation& obs) const {
  ForwardCache cache;

  if (config_.variant == NetworkVariant::kConv) {
    // Subnet 1: two input channels (returns, vols), kernels slide along lags.
    auto run_stack = [&](const std::vector<Eigen::MatrixXd>& input,
                         const std::string& prefix, int kernel,
                         const std::vector<int>& channels,
                         const std::vector<int>& strides)
        -> std::vector<std::vector<Eigen::MatrixXd>> {
      std::vector<std::vector<Eigen::MatrixXd>> acts;
      acts.push_back(input);
      for (std::size_t c = 0; c < channels.size(); ++c) {
        const auto w_blk =
            block_index(prefix + ".conv" + std::to_string(c + 1) + ".w");
        const auto b_blk =
            block_index(prefix + ".conv" + std::to_string(c + 1) + ".b");
        const auto weight = mat(theta, w_blk);
        const auto bias = mat(theta, b_blk);
        const auto& in = acts.back();
        const Eigen::Index rows = in[0].rows();
        const Eigen::Index w_in = in[0].cols();
        const int stride = strides[c];
        const Eigen::Index w_out = (w_in - kernel) / stride + 1;
        std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(channels[c]));
        for (Eigen::Index oc = 0; oc < channels[c]; ++oc) {
          Eigen::MatrixXd pre = Eigen::MatrixXd::Constant(rows, w_out, bias(oc, 0));
          for (std::size_t ic = 0; ic < in.size(); ++ic) {
            for (int u = 0; u < kernel; ++u) {
              const double wgt = weight(oc, static_cast<Eigen::Index>(ic) * kernel + u);
              for (Eigen::Index q = 0; q < w_out; ++q) {
                pre.col(q) += wgt * in[ic].col(q * stride + u);
              }
            }
          }
          out[static_cast<std::size_t>(oc)] = pre.cwiseMax(0.0);
        }
        acts.push_back(std::move(out));
      }
      return acts;
    };

    std::vector<Eigen::MatrixXd> in1 = {obs.returns, obs.vols};
    std::vector<int> ones(config_.subnet2_channels.size(), 1);
    cache.s1_acts = run_stack(in1, "s1", config_.subnet1_kernel,
                              config_.subnet1_channels, config_.subnet1_strides);
    if (config_.use_context) {
      std::vector<Eigen::MatrixXd> in2;
      in2.reserve(static_cast<std::size_t>(obs.context.rows()));
      for (Eigen::Index r = 0; r < obs.context.rows(); ++r) {
        in2.push_back(obs.context.row(r));
      }
      cache.s2_acts = run_stack(in2, "s2", config_.subnet2_kernel,
                                config_.subnet2_channels, ones);
    }

    cache.merged.resize(merged_size_);
    Eigen::Index at = 0;
    for (const Eigen::MatrixXd& map : cache.s1_acts.back()) {
      cache.merged.segment(at, map.size()) =
          Eigen::Map<const Eigen::VectorXd>(map.data(), map.size());
      at += map.size();
    }
    if (config_.use_context) {
      for (const Eigen::MatrixXd& map : cache.s2_acts.back()) {
        cache.merged.segment(at, map.size()) =
            Eigen::Map<const Eigen::VectorXd>(map.data(), map.size());
        at += map.size();
      }
    }
  } else {
    // Recurrent cells walk the lag axis in stored order (oldest first with
    // the default grid).
    auto run_gru = [&](const Eigen::MatrixXd& xs, const std::string& base,
                       Eigen::Index hidden, Eigen::MatrixXd& x_out,
                       Eigen::MatrixXd& h_out, Eigen::MatrixXd& z_out,
                       Eigen::MatrixXd& r_out, Eigen::MatrixXd& c_out) {
      const auto wz = mat(theta, block_index(base + ".wz"));
      const auto uz = mat(theta, block_index(base + ".uz"));
      const auto bz = mat(theta, block_index(base + ".bz"));
      const auto wr = mat(theta, block_index(base + ".wr"));
      const auto ur = mat(theta, block_index(base + ".ur"));
      const auto br = mat(theta, block_index(base + ".br"));
      const auto wc = mat(theta, block_index(base + ".wc"));
      const auto uc = mat(theta, block_index(base + ".uc"));
      const auto bc = mat(theta, block_index(base + ".bc"));
      const Eigen::Index steps = xs.cols();
      x_out = xs;
      h_out.setZero(hidden, steps + 1);
      z_out.resize(hidden, steps);
      r_out.resize(hidden, steps);
      c_out.resize(hidden, steps);
      for (Eigen::Index s = 0; s < steps; ++s) {
        const Eigen::VectorXd x = xs.col(s);
        const Eigen::VectorXd h_prev = h_out.col(s);
        const Eigen::VectorXd z =
            (wz * x + uz * h_prev + bz.col(0)).unaryExpr([](double v) {
              return sigmoid(v);
            });
        const Eigen::VectorXd r =
            (wr * x + ur * h_prev + br.col(0)).unaryExpr([](double v) {
              return sigmoid(v);
            });
        const Eigen::VectorXd c =
            (wc * x + uc * (r.cwiseProduct(h_prev)) + bc.col(0))
                .array()
                .tanh()
                .matrix();
        z_out.col(s) = z;
        r_out.col(s) = r;
        c_out.col(s) = c;
        h_out.col(s + 1) =
            (Eigen::VectorXd::Ones(hidden) - z).cwiseProduct(h_prev) +
            z.cwiseProduct(c);
      }
    };

    Eigen::MatrixXd xs1(2 * shape_.strategies, shape_.asset_lags);
    xs1.topRows(shape_.strategies) = obs.returns;
    xs1.bottomRows(shape_.strategies) = obs.vols;
    run_gru(xs1, "s1.gru", config_.subnet1_hidden, cache.s1_x, cache.s1_h,
            cache.s1_z, cache.s1_r, cache.s1_c);
    if (config_.use_context) {
      run_gru(obs.context, "s2.gru", config_.subnet2_hidden, cache.s2_x,
              cache.s2_h, cache.s2_z, cache.s2_r, cache.s2_c);
    }

    cache.merged.resize(merged_size_);
    cache.merged.head(config_.subnet1_hidden) = cache.s1_h.rightCols<1>();
    if (config_.use_context) {
      cache.merged.tail(config_.subnet2_hidden) = cache.s2_h.rightCols<1>();
    }
  }

  const Eigen::VectorXd hidden_pre =
      mat(theta, block_index("merge.w")) * cache.merged +
      mat(theta, block_index("merge.b")).col(0);
  cache.hidden = hidden_pre.cwiseMax(0.0);
  const Eigen::VectorXd logits =
      mat(theta, block_index("out.w")) * cache.hidden +
      mat(theta, block_index("out.b")).col(0);
  cache.output = stable_softmax(logits);
  return cache;
}

Eigen::VectorXd Policy::forward(const PolicyParams& params,
                                const Observation& obs) const {
  check_params(params);
  check_obs(obs);
  return run_forward(params.values, obs).output;
}

ForwardCache Policy::forward_cached(const PolicyParams& params,
                                    const Observation& obs) const {
  check_params(params);
  check_obs(obs);
  return run_forward(params.values, obs);
}

Eigen::VectorXd Policy::backward(const PolicyParams& params,
                                 const std::vector<ForwardCache>& caches,
                                 const Eigen::MatrixXd& d_output) const {
  check_params(params);
  if (caches.empty() ||
      d_output.rows() != static_cast<Eigen::Index>(caches.size()) ||
      d_output.cols() != config_.num_strategies) {
    throw StateError("backward needs one cached forward pass per output gradient");
  }
  const Eigen::VectorXd& theta = params.values;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(total_params_);

  const auto merge_w = block_index("merge.w");
  const auto merge_b = block_index("merge.b");
  const auto out_w = block_index("out.w");
  const auto out_b = block_index("out.b");

  for (std::size_t step = 0; step < caches.size(); ++step) {
    const ForwardCache& cache = caches[step];
    const Eigen::VectorXd da =
        d_output.row(static_cast<Eigen::Index>(step)).transpose();
    const Eigen::VectorXd& a = cache.output;

    // Softmax Jacobian: dlogits = a o (da - a.da).
    const double inner = a.dot(da);
    const Eigen::VectorXd dlogits = (a.array() * (da.array() - inner)).matrix();

    mat(grad, out_w) += dlogits * cache.hidden.transpose();
    mat(grad, out_b).col(0) += dlogits;
    Eigen::VectorXd dhidden = mat(theta, out_w).transpose() * dlogits;
    for (Eigen::Index i = 0; i < dhidden.size(); ++i) {
      if (cache.hidden(i) <= 0.0) dhidden(i) = 0.0;
    }
    mat(grad, merge_w) += dhidden * cache.merged.transpose();
    mat(grad, merge_b).col(0) += dhidden;
    Eigen::VectorXd dmerged = mat(theta, merge_w).transpose() * dhidden;

    if (config_.variant == NetworkVariant::kConv) {
      auto stack_backward = [&](const std::vector<std::vector<Eigen::MatrixXd>>&
                                    acts,
                                const std::string& prefix, int kernel,
                                const std::vector<int>& channels,
                                const std::vector<int>& strides,
                                std::vector<Eigen::MatrixXd> d_out) {
        for (int c = static_cast<int>(channels.size()) - 1; c >= 0; --c) {
          const auto w_blk =
              block_index(prefix + ".conv" + std::to_string(c + 1) + ".w");
          const auto b_blk =
              block_index(prefix + ".conv" + std::to_string(c + 1) + ".b");
          const auto weight = mat(theta, w_blk);
          auto dweight = mat(grad, w_blk);
          auto dbias = mat(grad, b_blk);
          const auto& in = acts[static_cast<std::size_t>(c)];
          const auto& out = acts[static_cast<std::size_t>(c) + 1];
          const int stride = strides[static_cast<std::size_t>(c)];
          const Eigen::Index w_out = out[0].cols();

          std::vector<Eigen::MatrixXd> d_in;
          if (c > 0) {
            d_in.assign(in.size(),
                        Eigen::MatrixXd::Zero(in[0].rows(), in[0].cols()));
          }
          for (std::size_t oc = 0; oc < out.size(); ++oc) {
            // ReLU mask from the post-activation map.
            Eigen::MatrixXd dpre = d_out[oc];
            for (Eigen::Index i = 0; i < dpre.rows(); ++i) {
              for (Eigen::Index q = 0; q < dpre.cols(); ++q) {
                if (out[oc](i, q) <= 0.0) dpre(i, q) = 0.0;
              }
            }
            dbias(static_cast<Eigen::Index>(oc), 0) += dpre.sum();
            for (std::size_t ic = 0; ic < in.size(); ++ic) {
              for (int u = 0; u < kernel; ++u) {
                double acc = 0.0;
                for (Eigen::Index q = 0; q < w_out; ++q) {
                  acc += dpre.col(q).dot(in[ic].col(q * stride + u));
                }
                dweight(static_cast<Eigen::Index>(oc),
                        static_cast<Eigen::Index>(ic) * kernel + u) += acc;
                if (c > 0) {
                  const double wgt = weight(
                      static_cast<Eigen::Index>(oc),
                      static_cast<Eigen::Index>(ic) * kernel + u);
                  for (Eigen::Index q = 0; q < w_out; ++q) {
                    d_in[ic].col(q * stride + u) += wgt * dpre.col(q);
                  }
                }
              }
            }
          }
          if (c > 0) d_out = std::move(d_in);
        }
      };

      Eigen::Index at = 0;
      std::vector<Eigen::MatrixXd> d1;
      for (const Eigen::MatrixXd& map : cache.s1_acts.back()) {
        d1.push_back(Eigen::Map<const Eigen::MatrixXd>(
            dmerged.data() + at, map.rows(), map.cols()));
        at += map.size();
      }
      stack_backward(cache.s1_acts, "s1", config_.subnet1_kernel,
                     config_.subnet1_channels, config_.subnet1_strides,
                     std::move(d1));
      if (config_.use_context) {
        std::vector<Eigen::MatrixXd> d2;
        for (const Eigen::MatrixXd& map : cache.s2_acts.back()) {
          d2.push_back(Eigen::Map<const Eigen::MatrixXd>(
              dmerged.data() + at, map.rows(), map.cols()));
          at += map.size();
        }
        std::vector<int> ones(config_.subnet2_channels.size(), 1);
        stack_backward(cache.s2_acts, "s2", config_.subnet2_kernel,
                       config_.subnet2_channels, ones, std::move(d2));
      }
    } else {
      auto gru_backward = [&](const std::string& base, const Eigen::MatrixXd& xs,
                              const Eigen::MatrixXd& hs, const Eigen::MatrixXd& zs,
                              const Eigen::MatrixXd& rs, const Eigen::MatrixXd& cs,
                              Eigen::VectorXd dh) {
        const auto wz_b = block_index(base + ".wz");
        const auto uz_b = block_index(base + ".uz");
        const auto bz_b = block_index(base + ".bz");
        const auto wr_b = block_index(base + ".wr");
        const auto ur_b = block_index(base + ".ur");
        const auto br_b = block_index(base + ".br");
        const auto wc_b = block_index(base + ".wc");
        const auto uc_b = block_index(base + ".uc");
        const auto bc_b = block_index(base + ".bc");
        const auto uz = mat(theta, uz_b);
        const auto ur = mat(theta, ur_b);
        const auto uc = mat(theta, uc_b);
        for (Eigen::Index s = xs.cols() - 1; s >= 0; --s) {
          const Eigen::VectorXd x = xs.col(s);
          const Eigen::VectorXd h_prev = hs.col(s);
          const Eigen::VectorXd z = zs.col(s);
          const Eigen::VectorXd r = rs.col(s);
          const Eigen::VectorXd c = cs.col(s);

          const Eigen::VectorXd dz = dh.cwiseProduct(c - h_prev);
          const Eigen::VectorXd dc = dh.cwiseProduct(z);
          Eigen::VectorXd dh_prev =
              dh.cwiseProduct(Eigen::VectorXd::Ones(dh.size()) - z);

          const Eigen::VectorXd dpre_c =
              dc.cwiseProduct((1.0 - c.array().square()).matrix());
          mat(grad, wc_b) += dpre_c * x.transpose();
          mat(grad, uc_b) += dpre_c * (r.cwiseProduct(h_prev)).transpose();
          mat(grad, bc_b).col(0) += dpre_c;
          const Eigen::VectorXd drh = uc.transpose() * dpre_c;
          const Eigen::VectorXd dr = drh.cwiseProduct(h_prev);
          dh_prev += drh.cwiseProduct(r);

          const Eigen::VectorXd dpre_r = dr.cwiseProduct(
              (r.array() * (1.0 - r.array())).matrix());
          mat(grad, wr_b) += dpre_r * x.transpose();
          mat(grad, ur_b) += dpre_r * h_prev.transpose();
          mat(grad, br_b).col(0) += dpre_r;
          dh_prev += ur.transpose() * dpre_r;

          const Eigen::VectorXd dpre_z = dz.cwiseProduct(
              (z.array() * (1.0 - z.array())).matrix());
          mat(grad, wz_b) += dpre_z * x.transpose();
          mat(grad, uz_b) += dpre_z * h_prev.transpose();
          mat(grad, bz_b).col(0) += dpre_z;
          dh_prev += uz.transpose() * dpre_z;

          dh = std::move(dh_prev);
        }
      };

      gru_backward("s1.gru", cache.s1_x, cache.s1_h, cache.s1_z, cache.s1_r,
                   cache.s1_c, dmerged.head(config_.subnet1_hidden));
      if (config_.use_context) {
        gru_backward("s2.gru", cache.s2_x, cache.s2_h, cache.s2_z, cache.s2_r,
                     cache.s2_c, dmerged.tail(config_.subnet2_hidden));
      }
    }
  }
  return grad;
}

void Policy::save_params(const PolicyParams& params,
                         const std::filesystem::path& path) const {
  check_params(params);
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "hedgebot-policy v1\n";
  out << "params " << total_params_ << '\n';
  for (const ParamBlock& b : layout_) {
    out << "block " << b.name << ' ' << b.offset << ' ' << b.rows << ' '
        << b.cols << '\n';
  }
  out << "values\n";
  for (Eigen::Index i = 0; i < total_params_; ++i) {
    out << format_double(params.values(i)) << '\n';
  }
}

PolicyParams Policy::load_params(const std::filesystem::path& path) const {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "hedgebot-policy v1") {
    throw ParseError("not a hedgebot policy file: " + path.string());
  }
  Eigen::Index count = 0;
  std::string word;
  in >> word >> count;
  if (word != "params" || count != total_params_) {
    throw ValidationError("policy file does not match this network (" +
                          std::to_string(count) + " vs " +
                          std::to_string(total_params_) + " params)");
  }
  for (const ParamBlock& expect : layout_) {
    std::string name;
    Eigen::Index offset = 0, rows = 0, cols = 0;
    in >> word >> name >> offset >> rows >> cols;
    if (word != "block" || name != expect.name || offset != expect.offset ||
        rows != expect.rows || cols != expect.cols) {
      throw ValidationError("policy file layout mismatch at block " + name);
    }
  }
  in >> word;
  if (word != "values") throw ParseError("missing values section");
  PolicyParams params;
  params.values.resize(total_params_);
  params.layout = layout_;
  for (Eigen::Index i = 0; i < total_params_; ++i) {
    std::string token;
    if (!(in >> token)) throw ParseError("truncated policy file");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError("bad value '" + token + "' in policy file");
    }
    params.values(i) = v;
  }
  return params;
}

}  // namespace hedgebot
