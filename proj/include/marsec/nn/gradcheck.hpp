// Central-difference verification of tape gradients.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "marsec/nn/tape.hpp"

namespace marsec::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

/// Compares backward() against (f(p+eps) - f(p-eps)) / 2eps for every coordinate
/// of `params`. `build_loss` must be deterministic. The relative error uses
/// max(|analytic|, |numeric|, floor) as denominator so vanishing gradients are
/// judged on absolute error.
inline GradCheckReport finite_diff_check(const std::function<Var(Tape&)>& build_loss,
                                         std::span<ParamTensor* const> params, double eps = 1e-6,
                                         double floor = 1e-4) {
  if (eps < 1e-7 || eps > 1e-3) throw std::invalid_argument("finite_diff_check: eps must lie in [1e-7, 1e-3]");
  for (ParamTensor* p : params) p->zero_grad();
  {
    Tape t;
    t.backward(build_loss(t));
  }
  auto eval = [&] {
    Tape t;
    return build_loss(t).scalar();
  };
  GradCheckReport rep;
  for (ParamTensor* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& w = p->value.data()[i];
      const double saved = w;
      w = saved + eps;
      const double up = eval();
      w = saved - eps;
      const double down = eval();
      w = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p->grad.data()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      const double err = std::abs(analytic - numeric) / denom;
      ++rep.coordinates;
      if (err > rep.max_rel_error) {
        rep.max_rel_error = err;
        rep.worst_param = p->name;
        rep.worst_index = static_cast<std::size_t>(i);
      }
    }
  }
  return rep;
}

}  // namespace marsec::nn
