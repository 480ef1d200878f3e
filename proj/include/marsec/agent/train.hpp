// Off-policy training loop shared by every learned agent, plus a 1-D toy task
// with a known optimum used to check that learning works at all.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "marsec/agent/replay_buffer.hpp"
#include "marsec/agent/sac_cvae.hpp"

namespace marsec::agent {

struct TrainOptions {
  long long iterations = 20000;  // environment steps
  long long eval_interval = 80;
  std::uint64_t seed = 0;
};

struct EvalPoint {
  long long iteration = 0;
  double value = 0.0;  // mean evaluation return
  std::map<std::string, double> extra;
};

struct TrainSummary {
  long long iterations = 0;
  long long episodes = 0;
  long long updates = 0;
  std::vector<EvalPoint> evals;
  UpdateStats last_update;
};

template <class Env>
struct TrainHooks {
  std::function<EvalPoint(SacAgent&, long long)> evaluate;
  std::function<void(const EvalPoint&, const UpdateStats&)> on_eval;
  std::function<void(long long episode, Env&)> on_episode_end;
};

/// Runs `iterations` environment steps. The first `warmup` steps use uniform
/// random actions; afterwards each step is followed by `updates_per_step`
/// gradient steps on a uniformly sampled minibatch. K (the CVAE cut-off)
/// defaults to half of the iterations.
template <class Env>
TrainSummary train_agent(Env& env, SacAgent& agent, const TrainOptions& opt, const TrainHooks<Env>& hooks = {}) {
  const AgentConfig& cfg = agent.config();
  if (opt.iterations < 0) throw ConfigError("train.iterations must be >= 0");
  if (opt.eval_interval <= 0) throw ConfigError("train.eval_interval must be >= 1");
  if (agent.cvae_steps() < 0) agent.set_cvae_steps(cfg.cvae_steps >= 0 ? cfg.cvae_steps : opt.iterations / 2);

  Rng rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ReplayBuffer buffer(cfg.buffer, agent.state_dim(), agent.action_dim());
  TrainSummary out;
  std::vector<double> s = env.reset(rng());
  std::vector<double> a(agent.action_dim());

  for (long long it = 1; it <= opt.iterations; ++it) {
    if (static_cast<std::size_t>(it) <= cfg.warmup) {
      for (double& v : a) v = u(rng);
    } else {
      a = agent.select_action(s, true);
    }
    auto res = env.step(a);
    buffer.add(s, a, res.reward, res.state, res.done);
    s = std::move(res.state);
    if (res.done) {
      ++out.episodes;
      if (hooks.on_episode_end) hooks.on_episode_end(out.episodes, env);
      s = env.reset(rng());
    }
    if (static_cast<std::size_t>(it) > cfg.warmup && buffer.size() >= cfg.batch) {
      for (std::size_t k = 0; k < cfg.updates_per_step; ++k) {
        out.last_update = agent.update(buffer.sample(cfg.batch, rng), it);
        ++out.updates;
      }
    }
    if (hooks.evaluate && it % opt.eval_interval == 0) {
      EvalPoint p = hooks.evaluate(agent, it);
      p.iteration = it;
      if (hooks.on_eval) hooks.on_eval(p, out.last_update);
      out.evals.push_back(std::move(p));
    }
  }
  out.iterations = opt.iterations;
  return out;
}

/// Undiscounted return of one deterministic episode.
template <class Env>
double greedy_episode_return(Env& env, const SacAgent& agent, std::uint64_t seed) {
  std::vector<double> s = env.reset(seed);
  double total = 0.0;
  for (;;) {
    auto res = env.step(agent.greedy_action(s));
    total += res.reward;
    if (res.done) return total;
    s = std::move(res.state);
  }
}

/// A point on [-2, 2] moves by at most `step` per slot toward a random target
/// in [-1, 1]. Reward 1 - (x - target)^2 / 4 per slot over a fixed horizon.
/// Moving at full speed until the target is reachable is optimal.
class PointTargetEnv {
 public:
  struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
  };

  explicit PointTargetEnv(int horizon = 20, double step = 0.5) : horizon_(horizon), step_(step) {}

  std::size_t state_dim() const { return 2; }
  std::size_t action_dim() const { return 1; }

  std::vector<double> reset(std::uint64_t seed) {
    Rng rng(seed);
    x_ = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    target_ = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    t_ = 0;
    return state();
  }

  StepResult step(std::span<const double> a) {
    if (a.size() != 1) throw std::invalid_argument("point env: action must have one entry");
    if (t_ >= horizon_) throw ProtocolError("point env: step after episode end");
    x_ = std::clamp(x_ + step_ * std::clamp(a[0], -1.0, 1.0), -2.0, 2.0);
    ++t_;
    return {state(), reward(x_), t_ >= horizon_};
  }

  /// Best achievable return from the current reset state.
  double optimal_return() const {
    double x = x_, total = 0.0;
    for (int t = t_; t < horizon_; ++t) {
      const double d = target_ - x;
      x += std::clamp(d, -step_, step_);
      total += reward(x);
    }
    return total;
  }

 private:
  double reward(double x) const { return 1.0 - (x - target_) * (x - target_) / 4.0; }
  std::vector<double> state() const { return {x_ / 2.0, target_}; }

  int horizon_;
  double step_;
  double x_ = 0.0, target_ = 0.0;
  int t_ = 0;
};

}  // namespace marsec::agent
