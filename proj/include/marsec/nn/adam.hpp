#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "marsec/nn/tape.hpp"

namespace marsec::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter set.
class Adam {
 public:
  // Gradients beyond this magnitude are clipped so the second moment stays finite.
  static constexpr double kGradLimit = 1e150;

  Adam() = default;
  Adam(std::vector<ParamTensor*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    for (ParamTensor* p : params_) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }

  void zero_grad() {
    for (ParamTensor* p : params_) p->zero_grad();
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      ParamTensor& p = *params_[k];
      const Matrix g = p.grad.cwiseMax(-kGradLimit).cwiseMin(kGradLimit);
      m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * g;
      v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * g.cwiseAbs2();
      p.value.array() -= cfg_.lr * (m_[k].array() / bc1) / ((v_[k].array() / bc2).sqrt() + cfg_.eps);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  long long step_count() const { return t_; }
  const std::vector<ParamTensor*>& params() const { return params_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void set_step_count(long long t) { t_ = t; }

  /// Re-points the optimizer at an identically shaped parameter set (after a copy).
  void rebind(std::vector<ParamTensor*> params) {
    if (params.size() != params_.size()) throw std::invalid_argument("adam: rebind size mismatch");
    params_ = std::move(params);
  }

 private:
  std::vector<ParamTensor*> params_;
  std::vector<Matrix> m_, v_;
  AdamConfig cfg_{};
  long long t_ = 0;
};

}  // namespace marsec::nn
