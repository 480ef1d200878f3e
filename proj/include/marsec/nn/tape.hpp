// Reverse-mode differentiation over dense row-major matrices.
//
// A Tape records every primitive in creation order, so replaying the adjoints
// from the loss back to the first node is an exact reverse topological sweep.
// Parameters enter the tape by reference; their gradients accumulate into
// ParamTensor::grad when backward() runs.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <type_traits>

#include <Eigen/Dense>

namespace marsec::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A trainable tensor: values plus a same-shaped gradient buffer.
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  Matrix value;
  Matrix grad;

  ParamTensor() = default;
  ParamTensor(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)),
        shape(rows == 1 ? std::vector<std::size_t>{cols} : std::vector<std::size_t>{rows, cols}),
        value(Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))),
        grad(Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))) {}

  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
  void zero_grad() { grad.setZero(); }
  bool all_finite() const { return value.allFinite() && grad.allFinite(); }
};

class Tape;

/// Handle to a tape node.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() { nodes_.reserve(256); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix m) {
    Node n;
    n.value = std::move(m);
    return append(std::move(n));
  }

  Var constant(double s) { return constant(Matrix::Constant(1, 1, s)); }

  /// Leaf referencing a parameter. The parameter must outlive the tape.
  Var param(ParamTensor& p) {
    Node n;
    n.param = &p;
    n.requires_grad = true;
    return append(std::move(n));
  }

  /// Records an operation. `fn` runs during backward with the node's own index.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
  }

  Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    for (const Var& v : inputs) {
      if (v.tape != this) throw std::invalid_argument("tape: operand from a different tape");
      n.inputs.push_back(v.id);
      n.requires_grad = n.requires_grad || nodes_[v.id].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(fn);
    return append(std::move(n));
  }

  const Matrix& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.param ? n.param->value : n.value;
  }

  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  /// Adjoint of node `id`; only valid inside a backward function.
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }

  template <class Expr>
  void accumulate(std::size_t id, const Expr& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      if constexpr (std::is_base_of_v<Eigen::ArrayBase<Expr>, Expr>)
        n.grad.array() += g;
      else
        n.grad += g;
    }
  }

  /// Propagates d(loss)/d(node) to every parameter reachable from `loss`.
  void backward(Var loss) {
    if (loss.tape != this) throw std::invalid_argument("tape: loss from a different tape");
    const Matrix& lv = value(loss.id);
    if (lv.rows() != 1 || lv.cols() != 1) throw std::invalid_argument("tape: backward needs a scalar loss");
    for (Node& n : nodes_) n.grad.resize(0, 0);
    nodes_[loss.id].grad = Matrix::Ones(1, 1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0) continue;
      for (std::size_t in : n.inputs)
        if (in >= i) throw std::logic_error("tape: cycle detected");
      if (n.param) {
        n.param->grad += n.grad;
      } else if (n.backward) {
        n.backward(*this, i);
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }

  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> inputs;
    ParamTensor* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var append(Node n) {
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
  }

  std::vector<Node> nodes_;
};

inline const Matrix& Var::value() const { return tape->value(id); }

// ---------------------------------------------------------------------------
// Primitive operations
// ---------------------------------------------------------------------------

namespace detail {
inline void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
inline bool is_scalar(const Var& v) { return v.rows() == 1 && v.cols() == 1; }
}  // namespace detail

/// x W^T + b with x [B x in], W [out x in], b [1 x out].
inline Var linear(Var x, Var w, Var b) {
  if (x.cols() != w.cols() || b.rows() != 1 || b.cols() != w.rows())
    throw std::invalid_argument("linear: shape mismatch");
  Matrix y = x.value() * w.value().transpose();
  y.rowwise() += b.value().row(0);
  const std::size_t xi = x.id, wi = w.id, bi = b.id;
  return x.tape->record(std::move(y), {x, w, b}, [xi, wi, bi](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(xi)) t.accumulate(xi, g * t.value(wi));
    if (t.requires_grad(wi)) t.accumulate(wi, g.transpose() * t.value(xi));
    if (t.requires_grad(bi)) t.accumulate(bi, g.colwise().sum());
  });
}

/// Elementwise a + b; either side may be a 1x1 scalar that broadcasts.
inline Var add(Var a, Var b) {
  if (detail::is_scalar(b) && !detail::is_scalar(a)) {
    Matrix y = a.value().array() + b.scalar();
    const std::size_t ai = a.id, bi = b.id;
    return a.tape->record(std::move(y), {a, b}, [ai, bi](Tape& t, std::size_t self) {
      t.accumulate(ai, t.grad(self));
      t.accumulate(bi, Matrix::Constant(1, 1, t.grad(self).sum()));
    });
  }
  if (detail::is_scalar(a) && !detail::is_scalar(b)) return add(b, a);
  detail::require_same_shape(a, b, "add");
  const std::size_t ai = a.id, bi = b.id;
  return a.tape->record(a.value() + b.value(), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    t.accumulate(ai, t.grad(self));
    t.accumulate(bi, t.grad(self));
  });
}

inline Var neg(Var a) {
  const std::size_t ai = a.id;
  return a.tape->record(-a.value(), {a}, [ai](Tape& t, std::size_t self) { t.accumulate(ai, -t.grad(self)); });
}

inline Var sub(Var a, Var b) { return add(a, neg(b)); }

/// Elementwise product; either side may be a 1x1 scalar that broadcasts.
inline Var mul(Var a, Var b) {
  if (detail::is_scalar(b) && !detail::is_scalar(a)) {
    const std::size_t ai = a.id, bi = b.id;
    return a.tape->record(a.value() * b.scalar(), {a, b}, [ai, bi](Tape& t, std::size_t self) {
      const Matrix& g = t.grad(self);
      t.accumulate(ai, g * t.value(bi)(0, 0));
      if (t.requires_grad(bi)) t.accumulate(bi, Matrix::Constant(1, 1, g.cwiseProduct(t.value(ai)).sum()));
    });
  }
  if (detail::is_scalar(a) && !detail::is_scalar(b)) return mul(b, a);
  detail::require_same_shape(a, b, "mul");
  const std::size_t ai = a.id, bi = b.id;
  return a.tape->record(a.value().cwiseProduct(b.value()), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ai)) t.accumulate(ai, g.cwiseProduct(t.value(bi)));
    if (t.requires_grad(bi)) t.accumulate(bi, g.cwiseProduct(t.value(ai)));
  });
}

inline Var scale(Var a, double c) {
  const std::size_t ai = a.id;
  return a.tape->record(a.value() * c, {a}, [ai, c](Tape& t, std::size_t self) { t.accumulate(ai, t.grad(self) * c); });
}

inline Var shift(Var a, double c) {
  const std::size_t ai = a.id;
  Matrix y = a.value().array() + c;
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) { t.accumulate(ai, t.grad(self)); });
}

inline Var relu(Var a) {
  const std::size_t ai = a.id;
  return a.tape->record(a.value().cwiseMax(0.0), {a}, [ai](Tape& t, std::size_t self) {
    t.accumulate(ai, (t.value(ai).array() > 0.0).cast<double>() * t.grad(self).array());
  });
}

inline Var tanh(Var a) {
  const std::size_t ai = a.id;
  Matrix y = a.value().array().tanh();
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) {
    const auto& y = t.value(self).array();
    t.accumulate(ai, (1.0 - y.square()) * t.grad(self).array());
  });
}

inline Var sigmoid(Var a) {
  const std::size_t ai = a.id;
  Matrix y = (1.0 + (-a.value().array()).exp()).inverse();
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) {
    const auto& y = t.value(self).array();
    t.accumulate(ai, (y * (1.0 - y)) * t.grad(self).array());
  });
}

inline Var exp(Var a) {
  const std::size_t ai = a.id;
  Matrix y = a.value().array().exp();
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) {
    t.accumulate(ai, t.value(self).cwiseProduct(t.grad(self)));
  });
}

inline Var log(Var a) {
  const std::size_t ai = a.id;
  Matrix y = a.value().array().log();
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) {
    t.accumulate(ai, t.grad(self).cwiseQuotient(t.value(ai)));
  });
}

/// log(1 + e^x), evaluated without overflow.
inline Var softplus(Var a) {
  const std::size_t ai = a.id;
  const auto& x = a.value().array();
  Matrix y = x.max(0.0) + (-x.abs()).exp().log1p();
  return a.tape->record(std::move(y), {a}, [ai](Tape& t, std::size_t self) {
    const Matrix s = (1.0 + (-t.value(ai).array()).exp()).inverse();
    t.accumulate(ai, s.cwiseProduct(t.grad(self)));
  });
}

inline Var square(Var a) {
  const std::size_t ai = a.id;
  return a.tape->record(a.value().cwiseAbs2(), {a}, [ai](Tape& t, std::size_t self) {
    t.accumulate(ai, 2.0 * t.value(ai).cwiseProduct(t.grad(self)));
  });
}

/// Elementwise minimum; ties route the adjoint to the first operand.
inline Var minimum(Var a, Var b) {
  detail::require_same_shape(a, b, "minimum");
  const std::size_t ai = a.id, bi = b.id;
  return a.tape->record(a.value().cwiseMin(b.value()), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    const Matrix pick_a = (t.value(ai).array() <= t.value(bi).array()).cast<double>();
    const Matrix& g = t.grad(self);
    t.accumulate(ai, pick_a.cwiseProduct(g));
    t.accumulate(bi, (1.0 - pick_a.array()).matrix().cwiseProduct(g));
  });
}

/// Clamps values; the adjoint passes only where the input was inside [lo, hi].
inline Var clamp(Var a, double lo, double hi) {
  const std::size_t ai = a.id;
  Matrix y = a.value().cwiseMax(lo).cwiseMin(hi);
  return a.tape->record(std::move(y), {a}, [ai, lo, hi](Tape& t, std::size_t self) {
    const auto& x = t.value(ai).array();
    t.accumulate(ai, ((x >= lo) && (x <= hi)).cast<double>() * t.grad(self).array());
  });
}

/// Row sums: [B x C] -> [B x 1].
inline Var sum_cols(Var a) {
  const std::size_t ai = a.id;
  const Eigen::Index c = a.cols();
  Matrix y = a.value().rowwise().sum();
  return a.tape->record(std::move(y), {a}, [ai, c](Tape& t, std::size_t self) {
    t.accumulate(ai, t.grad(self).replicate(1, c));
  });
}

inline Var sum(Var a) {
  const std::size_t ai = a.id;
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape->record(Matrix::Constant(1, 1, a.value().sum()), {a}, [ai, r, c](Tape& t, std::size_t self) {
    t.accumulate(ai, Matrix::Constant(r, c, t.grad(self)(0, 0)));
  });
}

inline Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

inline Var concat_cols(std::span<const Var> parts) {
  if (parts.size() == 0) throw std::invalid_argument("concat_cols: no operands");
  const Var& first = *parts.begin();
  Eigen::Index rows = first.rows(), cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix y(rows, cols);
  std::vector<std::pair<std::size_t, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    y.middleCols(at, p.cols()) = p.value();
    spans.emplace_back(p.id, p.cols());
    at += p.cols();
  }
  return first.tape->record(std::move(y), std::span<const Var>(parts.begin(), parts.size()),
                            [spans](Tape& t, std::size_t self) {
    Eigen::Index off = 0;
    for (const auto& [id, w] : spans) {
      t.accumulate(id, t.grad(self).middleCols(off, w));
      off += w;
    }
  });
}

inline Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw std::invalid_argument("slice_cols: out of range");
  const std::size_t ai = a.id;
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix y = a.value().middleCols(start, count);
  return a.tape->record(std::move(y), {a}, [ai, r, c, start, count](Tape& t, std::size_t self) {
    Matrix g = Matrix::Zero(r, c);
    g.middleCols(start, count) = t.grad(self);
    t.accumulate(ai, g);
  });
}

inline Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

/// Constant copy of a node's value; blocks gradient flow.
inline Var detach(Var a) { return a.tape->constant(a.value()); }

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }
inline Var operator*(Var a, double c) { return scale(a, c); }
inline Var operator+(Var a, double c) { return shift(a, c); }
inline Var operator-(Var a, double c) { return shift(a, -c); }

}  // namespace marsec::nn
