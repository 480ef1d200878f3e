// Versioned text checkpoints for parameter tensors and Adam state.
//
// Layout (one record per line, whitespace separated, doubles in shortest
// round-trip form so a save/load cycle is bit exact):
//
//   marsec-checkpoint 1
//   meta <key> <value>
//   tensor <name> <rows> <cols>
//   <rows*cols values>
//   adam <name> <step> <lr> <beta1> <beta2> <eps> <count>
//   moment <param-name> <rows> <cols>      (2*count of these: m then v per param)
//   <values>
//   end
#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "marsec/nn/adam.hpp"
#include "marsec/nn/tape.hpp"

namespace marsec::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Matrix value;
};

struct OptimizerRecord {
  std::string name;
  long long step = 0;
  AdamConfig config;
  std::vector<NamedTensor> first, second;
};

struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<NamedTensor> tensors;
  std::vector<OptimizerRecord> optimizers;

  const NamedTensor* find(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return &t;
    return nullptr;
  }
  const OptimizerRecord* find_optimizer(const std::string& name) const {
    for (const auto& o : optimizers)
      if (o.name == name) return &o;
    return nullptr;
  }
};

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw CheckpointError("checkpoint: bad number '" + s + "'");
  return v;
}

namespace detail {

inline void write_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) os << (i ? " " : "") << format_double(m.data()[i]);
  os << '\n';
}

inline Matrix read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  std::string tok;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(is >> tok)) throw CheckpointError("checkpoint: truncated tensor data");
    m.data()[i] = parse_double(tok);
  }
  return m;
}

template <class T>
T expect(std::istream& is, const char* what) {
  T v{};
  if (!(is >> v)) throw CheckpointError(std::string("checkpoint: expected ") + what);
  return v;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
  os << "marsec-checkpoint " << kCheckpointVersion << '\n';
  for (const auto& [k, v] : ck.meta) os << "meta " << k << ' ' << v << '\n';
  for (const auto& t : ck.tensors) {
    os << "tensor " << t.name << ' ' << t.value.rows() << ' ' << t.value.cols() << '\n';
    detail::write_matrix(os, t.value);
  }
  for (const auto& o : ck.optimizers) {
    os << "adam " << o.name << ' ' << o.step << ' ' << format_double(o.config.lr) << ' '
       << format_double(o.config.beta1) << ' ' << format_double(o.config.beta2) << ' '
       << format_double(o.config.eps) << ' ' << o.first.size() << '\n';
    for (std::size_t k = 0; k < o.first.size(); ++k) {
      for (const NamedTensor* t : {&o.first[k], &o.second[k]}) {
        os << "moment " << t->name << ' ' << t->value.rows() << ' ' << t->value.cols() << '\n';
        detail::write_matrix(os, t->value);
      }
    }
  }
  os << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& is) {
  Checkpoint ck;
  std::string tag;
  if (!(is >> tag) || tag != "marsec-checkpoint") throw CheckpointError("checkpoint: missing header");
  if (detail::expect<int>(is, "version") != kCheckpointVersion) throw CheckpointError("checkpoint: unsupported version");
  while (is >> tag) {
    if (tag == "end") return ck;
    if (tag == "meta") {
      const auto k = detail::expect<std::string>(is, "meta key");
      ck.meta[k] = detail::expect<std::string>(is, "meta value");
    } else if (tag == "tensor") {
      NamedTensor t;
      t.name = detail::expect<std::string>(is, "tensor name");
      const auto r = detail::expect<Eigen::Index>(is, "rows");
      const auto c = detail::expect<Eigen::Index>(is, "cols");
      t.value = detail::read_matrix(is, r, c);
      ck.tensors.push_back(std::move(t));
    } else if (tag == "adam") {
      OptimizerRecord o;
      o.name = detail::expect<std::string>(is, "optimizer name");
      o.step = detail::expect<long long>(is, "step");
      o.config.lr = parse_double(detail::expect<std::string>(is, "lr"));
      o.config.beta1 = parse_double(detail::expect<std::string>(is, "beta1"));
      o.config.beta2 = parse_double(detail::expect<std::string>(is, "beta2"));
      o.config.eps = parse_double(detail::expect<std::string>(is, "eps"));
      const auto n = detail::expect<std::size_t>(is, "moment count");
      for (std::size_t k = 0; k < 2 * n; ++k) {
        if (detail::expect<std::string>(is, "moment") != "moment") throw CheckpointError("checkpoint: expected moment");
        NamedTensor t;
        t.name = detail::expect<std::string>(is, "moment name");
        const auto r = detail::expect<Eigen::Index>(is, "rows");
        const auto c = detail::expect<Eigen::Index>(is, "cols");
        t.value = detail::read_matrix(is, r, c);
        (k % 2 == 0 ? o.first : o.second).push_back(std::move(t));
      }
      ck.optimizers.push_back(std::move(o));
    } else {
      throw CheckpointError("checkpoint: unknown record '" + tag + "'");
    }
  }
  throw CheckpointError("checkpoint: missing end marker");
}

inline void capture_params(Checkpoint& ck, const std::vector<ParamTensor*>& params) {
  for (const ParamTensor* p : params) ck.tensors.push_back({p->name, p->value});
}

/// Copies stored values into `params`; names and shapes must match exactly.
inline void restore_params(const Checkpoint& ck, const std::vector<ParamTensor*>& params) {
  for (ParamTensor* p : params) {
    const NamedTensor* t = ck.find(p->name);
    if (!t) throw CheckpointError("checkpoint: missing tensor " + p->name);
    if (t->value.rows() != p->value.rows() || t->value.cols() != p->value.cols())
      throw CheckpointError("checkpoint: shape mismatch for " + p->name);
    p->value = t->value;
  }
}

inline void capture_optimizer(Checkpoint& ck, const std::string& name, const Adam& opt) {
  OptimizerRecord o;
  o.name = name;
  o.step = opt.step_count();
  o.config = opt.config();
  for (std::size_t k = 0; k < opt.params().size(); ++k) {
    o.first.push_back({opt.params()[k]->name, opt.first_moments()[k]});
    o.second.push_back({opt.params()[k]->name, opt.second_moments()[k]});
  }
  ck.optimizers.push_back(std::move(o));
}

inline void restore_optimizer(const Checkpoint& ck, const std::string& name, Adam& opt) {
  const OptimizerRecord* o = ck.find_optimizer(name);
  if (!o) throw CheckpointError("checkpoint: missing optimizer " + name);
  if (o->first.size() != opt.params().size()) throw CheckpointError("checkpoint: optimizer size mismatch for " + name);
  for (std::size_t k = 0; k < o->first.size(); ++k) {
    if (o->first[k].value.rows() != opt.first_moments()[k].rows() ||
        o->first[k].value.cols() != opt.first_moments()[k].cols())
      throw CheckpointError("checkpoint: moment shape mismatch for " + name);
    opt.first_moments()[k] = o->first[k].value;
    opt.second_moments()[k] = o->second[k].value;
  }
  opt.set_step_count(o->step);
  opt.set_lr(o->config.lr);
}

}  // namespace marsec::nn
