// Comparison policies: one-step greedy random shooting, the jam-free setting,
// and the plain SAC configuration.
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "marsec/agent/sac_cvae.hpp"
#include "marsec/environment.hpp"
#include "marsec/evaluation.hpp"

namespace marsec {

struct GreedyConfig {
  std::size_t candidates = 256;
  std::uint64_t seed = 0;

  void validate() const {
    if (candidates == 0) throw ConfigError("greedy.candidates must be >= 1");
  }
};

struct GreedyDecision {
  std::vector<double> action;
  std::size_t index = 0;
  std::vector<double> rewards;  // one per candidate
};

/// Samples candidate actions uniformly in [-1,1]^d and keeps the one with the
/// highest one-step reward. All candidates of a decision share one noise draw;
/// ties go to the lowest index. Randomness comes from the policy's own stream.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(GreedyConfig cfg) : cfg_(cfg), rng_(cfg.seed) { cfg_.validate(); }

  GreedyDecision decide(const Environment& env) {
    const std::size_t d = env.action_dim();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SlotNoise noise = sample_slot_noise(env.config(), rng_);
    GreedyDecision out;
    out.rewards.reserve(cfg_.candidates);
    std::vector<double> a(d);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg_.candidates; ++k) {
      for (double& v : a) v = u(rng_);
      const double r = env.simulate(a, noise).info.breakdown.reward;
      out.rewards.push_back(r);
      if (r > best) {
        best = r;
        out.index = k;
        out.action = a;
      }
    }
    return out;
  }

  std::vector<double> operator()(const Environment& env, std::span<const double>) { return decide(env).action; }

  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  GreedyConfig cfg_;
  Rng rng_;
};

inline Policy greedy_policy(GreedyConfig cfg) {
  auto g = std::make_shared<GreedyPolicy>(cfg);
  return [g](const Environment& env, std::span<const double> s) { return (*g)(env, s); };
}

/// Deterministic (mean) action of a trained agent.
inline Policy agent_policy(const agent::SacAgent& a) {
  return [&a](const Environment&, std::span<const double> s) { return a.greedy_action(s); };
}

/// Same scenario with every jammer silent and parked.
inline EnvConfig nonjam_config(EnvConfig cfg) {
  cfg.jamming = false;
  return cfg;
}

inline EpisodeRecord nonjam_episode(const EnvConfig& cfg, std::uint64_t seed, const Policy& alice_policy,
                                    const EvePredictor& predictor = {}) {
  Environment env(nonjam_config(cfg));
  if (predictor) env.set_predictor(predictor);
  return run_episode(env, seed, alice_policy);
}

inline agent::AgentConfig plain_sac_mode(agent::AgentConfig hp) {
  hp.use_cvae = false;
  return hp;
}

}  // namespace marsec
