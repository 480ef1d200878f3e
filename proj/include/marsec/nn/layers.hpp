// Dense layers, multilayer perceptrons and diagonal-Gaussian heads.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "marsec/nn/tape.hpp"

namespace marsec::nn {

enum class Activation { none, relu, tanh };

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
template <class URBG>
void init_uniform_fan_in(ParamTensor& p, std::size_t fan_in, URBG& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = u(rng);
}

inline Matrix apply_activation(Matrix x, Activation a) {
  switch (a) {
    case Activation::relu: return x.cwiseMax(0.0);
    case Activation::tanh: return x.array().tanh().matrix();
    case Activation::none: return x;
  }
  return x;
}

inline Var apply_activation(Var x, Activation a) {
  switch (a) {
    case Activation::relu: return relu(x);
    case Activation::tanh: return tanh(x);
    case Activation::none: return x;
  }
  return x;
}

struct Dense {
  ParamTensor weight;  // [out x in]
  ParamTensor bias;    // [1 x out]

  Dense() = default;
  template <class URBG>
  Dense(const std::string& name, std::size_t in, std::size_t out, URBG& rng)
      : weight(name + ".weight", out, in), bias(name + ".bias", 1, out) {
    init_uniform_fan_in(weight, in, rng);
    init_uniform_fan_in(bias, in, rng);
  }

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.value.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.value.rows()); }

  Var forward(Tape& t, Var x) { return linear(x, t.param(weight), t.param(bias)); }

  Matrix predict(const Matrix& x) const {
    Matrix y = x * weight.value.transpose();
    y.rowwise() += bias.value.row(0);
    return y;
  }
};

/// Fully connected network: hidden layers share one activation, the last layer has its own.
class Mlp {
 public:
  Mlp() = default;

  template <class URBG>
  Mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, URBG& rng,
      Activation hidden_act = Activation::relu, Activation out_act = Activation::none)
      : hidden_act_(hidden_act), out_act_(out_act) {
    std::size_t prev = in;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
      layers_.emplace_back(name + ".l" + std::to_string(i), prev, hidden[i], rng);
      prev = hidden[i];
    }
    layers_.emplace_back(name + ".l" + std::to_string(hidden.size()), prev, out, rng);
  }

  Var forward(Tape& t, Var x) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      x = apply_activation(layers_[i].forward(t, x), i + 1 == layers_.size() ? out_act_ : hidden_act_);
    return x;
  }

  /// Tape-free evaluation; numerically identical to forward().
  Matrix predict(const Matrix& x) const {
    Matrix y = x;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      y = apply_activation(layers_[i].predict(y), i + 1 == layers_.size() ? out_act_ : hidden_act_);
    return y;
  }

  std::vector<ParamTensor*> params() {
    std::vector<ParamTensor*> out;
    for (Dense& d : layers_) {
      out.push_back(&d.weight);
      out.push_back(&d.bias);
    }
    return out;
  }

  std::vector<const ParamTensor*> params() const {
    std::vector<const ParamTensor*> out;
    for (const Dense& d : layers_) {
      out.push_back(&d.weight);
      out.push_back(&d.bias);
    }
    return out;
  }

  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }
  std::vector<Dense>& layers() { return layers_; }

 private:
  std::vector<Dense> layers_;
  Activation hidden_act_ = Activation::relu;
  Activation out_act_ = Activation::none;
};

// ---------------------------------------------------------------------------
// Diagonal Gaussian with the reparameterisation trick
// ---------------------------------------------------------------------------

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct GaussianSample {
  Var sample;    // [B x D]
  Var log_prob;  // [B x 1]
};

/// sample = mean + exp(log_std) * noise; log_prob sums the per-dimension densities.
inline GaussianSample gaussian_reparam(Var mean, Var log_std, const Matrix& noise) {
  if (mean.rows() != noise.rows() || mean.cols() != noise.cols() || log_std.rows() != noise.rows() ||
      log_std.cols() != noise.cols())
    throw std::invalid_argument("gaussian_reparam: shape mismatch");
  Tape& t = *mean.tape;
  const Var sample = mean + exp(log_std) * t.constant(noise);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  Matrix base = (-0.5 * noise.array().square() - half_log_2pi).rowwise().sum();
  const Var log_prob = t.constant(std::move(base)) - sum_cols(log_std);
  return {sample, log_prob};
}

/// tanh squashing with the change-of-variables correction
/// log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)).
inline GaussianSample tanh_squash(const GaussianSample& pre) {
  const Var u = pre.sample;
  const Var correction = sum_cols(2.0 * ((-u) + std::numbers::ln2 - softplus(-2.0 * u)));
  return {tanh(u), pre.log_prob - correction};
}

/// Splits a [B x 2D] head into mean and clamped log-std.
inline std::pair<Var, Var> split_gaussian_head(Var head, Eigen::Index dim) {
  return {slice_cols(head, 0, dim), clamp(slice_cols(head, dim, dim), kLogStdMin, kLogStdMax)};
}

template <class URBG>
Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, URBG& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace marsec::nn
