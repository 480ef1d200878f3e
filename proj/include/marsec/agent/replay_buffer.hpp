#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "marsec/nn/tape.hpp"

namespace marsec::agent {

using nn::Matrix;

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// Minibatch as row-stacked matrices; r and done are [B x 1].
struct Batch {
  Matrix s, a, r, s2, done;
  Eigen::Index size() const { return s.rows(); }
};

/// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
      : capacity_(capacity),
        s_(static_cast<Eigen::Index>(capacity), static_cast<Eigen::Index>(state_dim)),
        a_(static_cast<Eigen::Index>(capacity), static_cast<Eigen::Index>(action_dim)),
        r_(static_cast<Eigen::Index>(capacity), 1),
        s2_(static_cast<Eigen::Index>(capacity), static_cast<Eigen::Index>(state_dim)),
        d_(static_cast<Eigen::Index>(capacity), 1) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be >= 1");
  }

  void add(std::span<const double> s, std::span<const double> a, double r, std::span<const double> s2, bool done) {
    if (s.size() != static_cast<std::size_t>(s_.cols()) || s2.size() != s.size() ||
        a.size() != static_cast<std::size_t>(a_.cols()))
      throw std::invalid_argument("replay buffer: transition has the wrong shape");
    const auto row = static_cast<Eigen::Index>(inserted_ % capacity_);
    for (std::size_t j = 0; j < s.size(); ++j) {
      s_(row, static_cast<Eigen::Index>(j)) = s[j];
      s2_(row, static_cast<Eigen::Index>(j)) = s2[j];
    }
    for (std::size_t j = 0; j < a.size(); ++j) a_(row, static_cast<Eigen::Index>(j)) = a[j];
    r_(row, 0) = r;
    d_(row, 0) = done ? 1.0 : 0.0;
    ++inserted_;
  }

  void add(const Transition& t) { add(t.state, t.action, t.reward, t.next_state, t.done); }

  std::size_t size() const { return std::min<std::size_t>(inserted_, capacity_); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t inserted() const { return inserted_; }

  /// Distinct indices (Floyd's algorithm), in a deterministic order.
  template <class URBG>
  std::vector<std::size_t> sample_indices(std::size_t batch, URBG& rng) const {
    const std::size_t n = size();
    if (batch > n) throw std::invalid_argument("replay buffer: batch larger than contents");
    std::vector<std::size_t> out;
    out.reserve(batch);
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = n - batch; j < n; ++j) {
      const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      const std::size_t pick = seen.count(t) ? j : t;
      seen.insert(pick);
      out.push_back(pick);
    }
    return out;
  }

  Batch gather(std::span<const std::size_t> idx) const {
    const auto b = static_cast<Eigen::Index>(idx.size());
    Batch out{Matrix(b, s_.cols()), Matrix(b, a_.cols()), Matrix(b, 1), Matrix(b, s_.cols()), Matrix(b, 1)};
    for (Eigen::Index i = 0; i < b; ++i) {
      const auto k = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]);
      out.s.row(i) = s_.row(k);
      out.a.row(i) = a_.row(k);
      out.r(i, 0) = r_(k, 0);
      out.s2.row(i) = s2_.row(k);
      out.done(i, 0) = d_(k, 0);
    }
    return out;
  }

  template <class URBG>
  Batch sample(std::size_t batch, URBG& rng) const {
    const auto idx = sample_indices(batch, rng);
    return gather(idx);
  }

 private:
  std::size_t capacity_;
  Matrix s_, a_, r_, s2_, d_;
  std::uint64_t inserted_ = 0;
};

}  // namespace marsec::agent
