// Single LSTM cell over the concatenated [h_prev, x] input.
#pragma once

#include <string>
#include <vector>

#include "marsec/nn/layers.hpp"

namespace marsec::nn {

struct LstmCellParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  ParamTensor w_f, w_i, w_c, w_o;  // [hidden x (hidden + input)]
  ParamTensor b_f, b_i, b_c, b_o;  // [1 x hidden]

  LstmCellParams() = default;

  LstmCellParams(const std::string& name, std::size_t input, std::size_t hidden)
      : input_dim(input),
        hidden_dim(hidden),
        w_f(name + ".w_f", hidden, hidden + input),
        w_i(name + ".w_i", hidden, hidden + input),
        w_c(name + ".w_c", hidden, hidden + input),
        w_o(name + ".w_o", hidden, hidden + input),
        b_f(name + ".b_f", 1, hidden),
        b_i(name + ".b_i", 1, hidden),
        b_c(name + ".b_c", 1, hidden),
        b_o(name + ".b_o", 1, hidden) {}

  template <class URBG>
  LstmCellParams(const std::string& name, std::size_t input, std::size_t hidden, URBG& rng)
      : LstmCellParams(name, input, hidden) {
    for (ParamTensor* p : params()) init_uniform_fan_in(*p, hidden, rng);
  }

  std::vector<ParamTensor*> params() { return {&w_f, &w_i, &w_c, &w_o, &b_f, &b_i, &b_c, &b_o}; }
  std::vector<const ParamTensor*> params() const { return {&w_f, &w_i, &w_c, &w_o, &b_f, &b_i, &b_c, &b_o}; }
};

struct LstmState {
  Var h;
  Var c;
};

/// f, i, o gates are sigmoids, the candidate is tanh; c = f*c_prev + i*cand, h = o*tanh(c).
inline LstmState lstm_cell(Tape& t, Var x, Var h_prev, Var c_prev, LstmCellParams& p) {
  if (static_cast<std::size_t>(x.cols()) != p.input_dim || static_cast<std::size_t>(h_prev.cols()) != p.hidden_dim ||
      static_cast<std::size_t>(c_prev.cols()) != p.hidden_dim || h_prev.rows() != x.rows() ||
      c_prev.rows() != x.rows())
    throw std::invalid_argument("lstm_cell: shape mismatch");
  const Var hx = concat_cols({h_prev, x});
  const Var f = sigmoid(linear(hx, t.param(p.w_f), t.param(p.b_f)));
  const Var i = sigmoid(linear(hx, t.param(p.w_i), t.param(p.b_i)));
  const Var cand = tanh(linear(hx, t.param(p.w_c), t.param(p.b_c)));
  const Var c = f * c_prev + i * cand;
  const Var o = sigmoid(linear(hx, t.param(p.w_o), t.param(p.b_o)));
  return {o * tanh(c), c};
}

struct LstmValues {
  Matrix h;
  Matrix c;
};

/// Tape-free lstm_cell for inference; same arithmetic, no gradient bookkeeping.
inline LstmValues lstm_cell_predict(const Matrix& x, const Matrix& h_prev, const Matrix& c_prev,
                                    const LstmCellParams& p) {
  if (static_cast<std::size_t>(x.cols()) != p.input_dim || static_cast<std::size_t>(h_prev.cols()) != p.hidden_dim)
    throw std::invalid_argument("lstm_cell_predict: shape mismatch");
  Matrix hx(x.rows(), h_prev.cols() + x.cols());
  hx << h_prev, x;
  auto gate = [&](const ParamTensor& w, const ParamTensor& b) {
    Matrix z = hx * w.value.transpose();
    z.rowwise() += b.value.row(0);
    return z;
  };
  auto sig = [](const Matrix& z) -> Matrix { return (1.0 + (-z.array()).exp()).inverse().matrix(); };
  const Matrix f = sig(gate(p.w_f, p.b_f));
  const Matrix i = sig(gate(p.w_i, p.b_i));
  const Matrix cand = gate(p.w_c, p.b_c).array().tanh().matrix();
  const Matrix o = sig(gate(p.w_o, p.b_o));
  LstmValues out;
  out.c = f.cwiseProduct(c_prev) + i.cwiseProduct(cand);
  out.h = o.cwiseProduct(out.c.array().tanh().matrix());
  return out;
}

}  // namespace marsec::nn
