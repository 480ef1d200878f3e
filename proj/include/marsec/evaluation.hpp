// Episode rollouts with per-slot traces and totals.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "marsec/environment.hpp"

namespace marsec {

/// Maps the current environment and its state vector to an action in [-1,1]^d.
using Policy = std::function<std::vector<double>(const Environment&, std::span<const double>)>;

struct EpisodeTotals {
  double reward = 0.0;
  double secrecy = 0.0;         // sum of the (min over pairs) clamped secrecy rate
  double secrecy_signed = 0.0;  // sum of the (min over pairs) signed secrecy rate
  double energy_a = 0.0;
  double energy_b = 0.0;
  double objective = 0.0;  // weighted secrecy minus weighted energy, penalties excluded
  int w1_count = 0;
  int w2_count = 0;
  std::vector<double> pair_secrecy;         // per pair, summed over slots
  std::vector<double> pair_secrecy_signed;  // per pair, summed over slots

  double energy() const { return energy_a + energy_b; }
  double min_pair_secrecy() const { return *std::min_element(pair_secrecy.begin(), pair_secrecy.end()); }
  double min_pair_secrecy_signed() const {
    return *std::min_element(pair_secrecy_signed.begin(), pair_secrecy_signed.end());
  }
};

struct EpisodeRecord {
  EpisodeTotals totals;
  std::vector<std::vector<double>> rows;  // trace_values() per slot
};

inline void accumulate(EpisodeTotals& t, const EnvConfig& cfg, const StepInfo& info) {
  const RewardBreakdown& b = info.breakdown;
  if (t.pair_secrecy.empty()) {
    t.pair_secrecy.assign(info.c_s_pair.size(), 0.0);
    t.pair_secrecy_signed.assign(info.c_s_signed.size(), 0.0);
  }
  t.reward += b.reward;
  t.secrecy += b.c_s;
  t.secrecy_signed += info.c_s_signed_min;
  t.energy_a += b.e_a;
  t.energy_b += b.e_b;
  t.objective += cfg.reward.omega1 * cfg.reward.mu1 * b.c_s - cfg.reward.omega2 * cfg.mu2() * (b.e_a + b.e_b);
  t.w1_count += info.w1_fired ? 1 : 0;
  t.w2_count += info.w2_fired ? 1 : 0;
  for (std::size_t i = 0; i < info.c_s_pair.size(); ++i) {
    t.pair_secrecy[i] += info.c_s_pair[i];
    t.pair_secrecy_signed[i] += info.c_s_signed[i];
  }
}

inline EpisodeRecord run_episode(Environment& env, std::uint64_t seed, const Policy& policy, bool keep_rows = true) {
  EpisodeRecord rec;
  std::vector<double> s = env.reset(seed);
  for (;;) {
    auto res = env.step(policy(env, s));
    accumulate(rec.totals, env.config(), res.info);
    if (keep_rows) rec.rows.push_back(trace_values(env, res.info));
    if (res.done) break;
    s = std::move(res.state);
  }
  return rec;
}

}  // namespace marsec
