// Shared value types for the maritime secure-jamming simulator.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace marsec {

using Rng = std::mt19937_64;

/// Raised for inconsistent or out-of-range configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an API is driven out of order (e.g. stepping a finished episode).
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double horizontal_norm() const { return std::hypot(x, y); }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }
inline double horizontal_distance(Vec3 a, Vec3 b) { return (a - b).horizontal_norm(); }

/// Axis-aligned box; used for flight ranges and the arena.
struct Box3 {
  Vec3 lo;
  Vec3 hi;

  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }

  bool contains(Vec3 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }

  Vec3 clamp(Vec3 p) const {
    return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y), std::clamp(p.z, lo.z, hi.z)};
  }

  Vec3 center() const { return 0.5 * (lo + hi); }
};

/// Maps v in [lo, hi] affinely onto [-1, 1]. Degenerate ranges map to 0.
inline double to_unit(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return 2.0 * (v - lo) / (hi - lo) - 1.0;
}

inline double from_unit(double u, double lo, double hi) { return lo + 0.5 * (u + 1.0) * (hi - lo); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

}  // namespace marsec
