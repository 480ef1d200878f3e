// Bounded history of Eve positions with observed/missing flags.
#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <stdexcept>

#include "marsec/common.hpp"

namespace marsec {

struct TrackEntry {
  Vec3 position;  // last observed position when the entry is missing
  bool observed = false;
};

/// Keeps the most recent `capacity` entries in chronological order.
class ObservationWindow {
 public:
  ObservationWindow() = default;
  explicit ObservationWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("observation window length must be >= 1");
  }

  /// Appends an observation. A missing entry repeats the last observed position.
  void push_observed(Vec3 p) { push({p, true}); }
  void push_missing() {
    if (entries_.empty()) throw ProtocolError("observation window: first entry must be observed");
    push({entries_.back().position, false});
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const TrackEntry& operator[](std::size_t i) const { return entries_[i]; }
  const TrackEntry& back() const { return entries_.back(); }
  Vec3 last_position() const {
    if (entries_.empty()) throw std::domain_error("observation window is empty");
    return entries_.back().position;
  }
  void clear() { entries_.clear(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  void push(TrackEntry e) {
    entries_.push_back(e);
    while (entries_.size() > capacity_) entries_.pop_front();
  }

  std::size_t capacity_ = 8;
  std::deque<TrackEntry> entries_;
};

/// Estimates Eve's current position from the history up to the previous slot.
using EvePredictor = std::function<Vec3(const ObservationWindow&)>;

}  // namespace marsec
