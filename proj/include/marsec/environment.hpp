// The jamming-assisted secure maritime link as a partially observed episodic
// environment. Each slot: decode the action, clamp moves and transmit powers,
// advance the vessel and the eavesdroppers, draw U2V fading, and score the slot.
//
// A single (Alice, Bob, Eve) triple is the base scenario. With k pairs, Bob_i
// jams Eve_i only; every Bob's leakage adds to the interference at the MU and
// the reward uses the smallest per-pair secrecy rate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marsec/channel.hpp"
#include "marsec/common.hpp"
#include "marsec/mobility.hpp"
#include "marsec/track.hpp"

namespace marsec {

enum class W1Mode { literal, gap };

inline std::string to_string(W1Mode m) { return m == W1Mode::literal ? "literal" : "gap"; }
inline std::string to_string(mobility::EvePattern p) { return p == mobility::EvePattern::approach ? "approach" : "recede"; }

inline mobility::EvePattern parse_eve_pattern(const std::string& s) {
  if (s == "approach") return mobility::EvePattern::approach;
  if (s == "recede") return mobility::EvePattern::recede;
  throw ConfigError("unknown eve pattern '" + s + "' (expected approach|recede)");
}

inline W1Mode parse_w1_mode(const std::string& s) {
  if (s == "literal") return W1Mode::literal;
  if (s == "gap") return W1Mode::gap;
  throw ConfigError("unknown w1 mode '" + s + "' (expected literal|gap)");
}

struct RewardWeights {
  double omega1 = 0.5;
  double omega2 = 0.5;
  double mu1 = 1.0;
  std::optional<double> mu2;  // unset: 1 / (2 * hover power * dt)
  double mu3 = 10.0;
  double mu4 = 1e7;
};

/// Flight box of one jammer and the spawn region of the eavesdropper it covers.
struct PairGeometry {
  Box3 bob_box;
  Box3 eve_spawn;
};

/// Default layouts for up to four (Bob, Eve) pairs around the MU route.
inline std::vector<PairGeometry> default_pairs(std::size_t k) {
  static const PairGeometry table[] = {
      {{{200, 400, 50}, {300, 500, 70}}, {{240, 380, 55}, {260, 420, 65}}},
      {{{0, 400, 50}, {100, 500, 70}}, {{40, 380, 55}, {60, 420, 65}}},
      {{{200, 100, 50}, {300, 200, 70}}, {{240, 180, 55}, {260, 220, 65}}},
      {{{0, 100, 50}, {100, 200, 70}}, {{40, 180, 55}, {60, 220, 65}}},
  };
  if (k == 0 || k > std::size(table)) throw ConfigError("pairs must be in [1, 4]");
  return {table, table + k};
}

struct EnvConfig {
  int slots = 100;   // N
  double dt = 1.0;   // s
  Box3 alice_box{{100, 100, 50}, {200, 200, 70}};
  std::vector<PairGeometry> pairs = default_pairs(1);
  Box3 arena{{0, 0, 0}, {400, 600, 100}};
  Vec3 max_step{20, 20, 5};  // per-slot displacement bound, m

  double p_min = 0.0;    // mW
  double p_max = 10.0;   // mW
  double p_total = 400.0;  // mW over the episode, per UAV
  double r_min = 0.0014;   // bits/s/Hz
  double i0_dbm = -74.0;
  double min_link_distance = 1.0;  // m, floor for free-space loss

  RewardWeights reward;
  W1Mode w1_mode = W1Mode::literal;
  bool jamming = true;

  mobility::EvePattern eve_pattern = mobility::EvePattern::approach;
  mobility::EveMotionParams eve_motion;
  double p_obs = 0.5;
  std::size_t window = 8;  // Z

  Vec3 mu_start{150, 300, 0};
  double mu_yaw = 0.0;
  mobility::VesselParams vessel;
  mobility::PropulsionParams propulsion;
  channel::LinkBudgetParams link;

  std::size_t pair_count() const { return pairs.size(); }
  std::size_t state_dim() const { return 10 + 7 * pairs.size(); }
  std::size_t action_dim() const { return 4 + 4 * pairs.size(); }
  double i0_mw() const { return channel::db_to_linear(i0_dbm); }
  double mu2() const { return reward.mu2.value_or(1.0 / (2.0 * propulsion.hover_power() * dt)); }

  void validate() const {
    auto box_ok = [](const Box3& b) { return b.valid(); };
    if (slots < 1) throw ConfigError("env.slots must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("env.dt must be > 0");
    if (!box_ok(alice_box) || !box_ok(arena)) throw ConfigError("env: invalid box");
    if (pairs.empty()) throw ConfigError("env: at least one (bob, eve) pair is required");
    for (const auto& p : pairs)
      if (!box_ok(p.bob_box) || !box_ok(p.eve_spawn)) throw ConfigError("env: invalid pair box");
    if (!(max_step.x >= 0 && max_step.y >= 0 && max_step.z >= 0)) throw ConfigError("env.max_step must be >= 0");
    if (!(p_min >= 0.0 && p_min <= p_max)) throw ConfigError("env: need 0 <= p_min <= p_max");
    if (!(p_total >= 0.0)) throw ConfigError("env.p_total must be >= 0");
    if (!(r_min >= 0.0)) throw ConfigError("env.r_min must be >= 0");
    if (!(min_link_distance > 0.0)) throw ConfigError("env.min_link_distance must be > 0");
    if (!(p_obs >= 0.0 && p_obs <= 1.0)) throw ConfigError("env.p_obs must lie in [0, 1]");
    if (window < 1) throw ConfigError("env.window must be >= 1");
    const auto& r = reward;
    if (r.omega1 < 0 || r.omega2 < 0 || r.mu1 < 0 || r.mu3 < 0 || r.mu4 < 0 || (r.mu2 && *r.mu2 < 0))
      throw ConfigError("env.reward: weights and scales must be >= 0");
    if (!(eve_motion.speed >= 0.0) || !(eve_motion.heading_jitter >= 0.0) || eve_motion.z_min > eve_motion.z_max ||
        eve_motion.standoff < 0.0)
      throw ConfigError("env.eve: invalid motion parameters");
    vessel.validate();
    propulsion.validate();
    link.validate();
  }
};

// ---------------------------------------------------------------------------
// World state and per-slot randomness
// ---------------------------------------------------------------------------

struct UavState {
  Vec3 position;
  mobility::UavKinematics kinematics;
  double power = 0.0;        // mW, transmit power of the last slot
  double budget_used = 0.0;  // mW, consumed so far
};

struct WorldState {
  mobility::VesselState vessel;
  UavState alice;
  std::vector<UavState> bobs;
  std::vector<Vec3> eves;
  int slot = 1;  // next slot to play, 1-based
  bool done = false;

  Vec3 mu() const { return vessel.position(); }
};

/// Every random quantity consumed by one slot. Drawn in a fixed order that does
/// not depend on the action, so equal seeds give equal mobility and fading.
struct SlotNoise {
  mobility::VesselDisturbance vessel{};
  std::vector<double> eve_heading;  // rad
  double shadow_am = 0.0;           // dB
  std::vector<double> shadow_bm;
  channel::ComplexGain h_am{};
  std::vector<channel::ComplexGain> h_bm;
  std::vector<double> observe_u;  // uniform [0,1) per eavesdropper
};

template <class URBG>
SlotNoise sample_slot_noise(const EnvConfig& cfg, URBG& rng) {
  const std::size_t k = cfg.pair_count();
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SlotNoise s;
  for (double& f : s.vessel) f = cfg.vessel.disturbance_std * n01(rng);
  s.eve_heading.resize(k);
  for (double& h : s.eve_heading) h = cfg.eve_motion.heading_jitter * n01(rng);
  s.shadow_am = cfg.link.shadow_std * n01(rng);
  s.shadow_bm.resize(k);
  for (double& sh : s.shadow_bm) sh = cfg.link.shadow_std * n01(rng);
  s.h_am = channel::sample_cn01(rng);
  s.h_bm.resize(k);
  for (auto& h : s.h_bm) h = channel::sample_cn01(rng);
  s.observe_u.resize(k);
  for (double& u : s.observe_u) u = u01(rng);
  return s;
}

template <class URBG>
Vec3 uniform_in_box(const Box3& b, URBG& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng), y = u(rng), z = u(rng);
  return {b.lo.x + x * (b.hi.x - b.lo.x), b.lo.y + y * (b.hi.y - b.lo.y), b.lo.z + z * (b.hi.z - b.lo.z)};
}

/// Initial world: vessel at the route start, UAVs uniform in their boxes, Eve
/// uniform in its spawn region, nothing spent yet.
template <class URBG>
WorldState initial_world(const EnvConfig& cfg, URBG& rng) {
  WorldState w;
  w.vessel = mobility::vessel_at(cfg.mu_start, cfg.mu_yaw, cfg.vessel);
  w.alice.position = uniform_in_box(cfg.alice_box, rng);
  w.alice.kinematics = {w.alice.position, 0.0, 0.0};
  for (const auto& p : cfg.pairs) {
    UavState b;
    b.position = uniform_in_box(p.bob_box, rng);
    b.kinematics = {b.position, 0.0, 0.0};
    w.bobs.push_back(b);
  }
  for (const auto& p : cfg.pairs) {
    Vec3 e = uniform_in_box(p.eve_spawn, rng);
    e.z = std::clamp(e.z, cfg.eve_motion.z_min, cfg.eve_motion.z_max);
    w.eves.push_back(e);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Penalties and reward
// ---------------------------------------------------------------------------

/// Rate-requirement penalty. Literal mode returns r_m itself below the
/// threshold; gap mode returns the shortfall r_min - r_m.
inline double penalty_w1(double r_m, double r_min, W1Mode mode = W1Mode::literal) {
  if (r_m > r_min) return 0.0;
  return mode == W1Mode::literal ? r_m : r_min - r_m;
}

/// Interference-temperature penalty: the received jamming power at the MU when
/// it strictly exceeds I_0, else 0.
inline double penalty_w2(double p_b, channel::ComplexGain c_bm, double g_b_linear, double i0_linear) {
  const double x = p_b * g_b_linear * std::norm(c_bm);
  return x > i0_linear ? x : 0.0;
}

struct RewardBreakdown {
  double c_s = 0.0;  // bits/s/Hz
  double e_a = 0.0;  // J
  double e_b = 0.0;  // J, summed over jammers
  double w1 = 0.0;
  double w2 = 0.0;   // mW
  double reward = 0.0;
};

inline double scalarized_reward(double c_s, double e_a, double e_b, double w1, double w2, const RewardWeights& rw,
                                double mu2) {
  return rw.omega1 * rw.mu1 * c_s - rw.omega2 * mu2 * (e_a + e_b) - rw.mu3 * w1 - rw.mu4 * w2;
}

/// Max-min aggregation over pairs.
inline double minmax_secrecy(std::span<const double> c_s_per_pair) {
  if (c_s_per_pair.empty()) throw std::domain_error("minmax_secrecy: empty list");
  return *std::min_element(c_s_per_pair.begin(), c_s_per_pair.end());
}

// ---------------------------------------------------------------------------
// Deterministic slot transition
// ---------------------------------------------------------------------------

struct StepInfo {
  RewardBreakdown breakdown;
  double r_m = 0.0;
  std::vector<double> r_e;           // per pair
  std::vector<double> c_s_pair;      // clamped per pair
  std::vector<double> c_s_signed;    // R_M - R_E_i per pair
  double c_s_signed_min = 0.0;
  std::vector<double> interference;  // received jamming power at the MU per Bob, mW
  bool w1_fired = false;
  bool w2_fired = false;
};

struct SlotOutcome {
  WorldState next;
  StepInfo info;
};

struct UavCommand {
  Vec3 delta;
  double power_request = 0.0;
};

struct DecodedAction {
  UavCommand alice;
  std::vector<UavCommand> bobs;
};

/// Maps a normalized action in [-1,1]^(4+4k) to displacements and power requests.
/// Components outside [-1,1] are clipped.
inline DecodedAction decode_action(const EnvConfig& cfg, std::span<const double> a) {
  if (a.size() != cfg.action_dim())
    throw std::invalid_argument("action has " + std::to_string(a.size()) + " components, expected " +
                                std::to_string(cfg.action_dim()));
  for (double v : a)
    if (std::isnan(v)) throw std::invalid_argument("action contains NaN");
  auto cmd = [&](std::size_t off) {
    auto c = [&](std::size_t i) { return std::clamp(a[off + i], -1.0, 1.0); };
    return UavCommand{{c(0) * cfg.max_step.x, c(1) * cfg.max_step.y, c(2) * cfg.max_step.z},
                      from_unit(c(3), cfg.p_min, cfg.p_max)};
  };
  DecodedAction d;
  d.alice = cmd(0);
  for (std::size_t i = 0; i < cfg.pair_count(); ++i) d.bobs.push_back(cmd(4 + 4 * i));
  return d;
}

namespace detail {

/// Moves one UAV, grants power from its remaining budget and returns the slot energy.
inline double advance_uav(const EnvConfig& cfg, UavState& u, const UavCommand& c, const Box3& box) {
  const Vec3 next = mobility::uav_apply_action(u.position, c.delta, box);
  const auto kin = mobility::kinematics_from_move(u.position, next, cfg.dt);
  const double energy = mobility::slot_energy(u.kinematics, kin, cfg.propulsion, cfg.dt);
  u.position = next;
  u.kinematics = kin;

  const double remaining = std::max(0.0, cfg.p_total - u.budget_used);
  const double p = std::clamp(std::min(c.power_request, remaining), 0.0, cfg.p_max);
  u.power = p;
  u.budget_used = std::min(cfg.p_total, u.budget_used + p);
  return energy;
}

}  // namespace detail

/// Applies one slot to `w` using pre-drawn randomness. Pure: the same inputs
/// always give the same outcome, which lets planners query candidate actions.
inline SlotOutcome transition(const EnvConfig& cfg, const WorldState& w, std::span<const double> action,
                              const SlotNoise& noise) {
  if (w.done || w.slot > cfg.slots) throw ProtocolError("step called on a finished episode");
  const std::size_t k = cfg.pair_count();
  DecodedAction cmd = decode_action(cfg, action);
  if (!cfg.jamming)
    for (auto& b : cmd.bobs) b = UavCommand{};

  SlotOutcome out{w, {}};
  WorldState& n = out.next;
  StepInfo& info = out.info;

  info.breakdown.e_a = detail::advance_uav(cfg, n.alice, cmd.alice, cfg.alice_box);
  for (std::size_t i = 0; i < k; ++i)
    info.breakdown.e_b += detail::advance_uav(cfg, n.bobs[i], cmd.bobs[i], cfg.pairs[i].bob_box);

  n.vessel = mobility::vessel_step(w.vessel, cfg.vessel, cfg.dt, noise.vessel);
  const Vec3 mu = n.mu();
  for (std::size_t i = 0; i < k; ++i)
    n.eves[i] = mobility::eve_step(w.eves[i], cfg.eve_pattern, mu, n.alice.position, cfg.eve_motion, cfg.dt,
                                   noise.eve_heading[i]);

  const auto& lp = cfg.link;
  const double g_b = channel::db_to_linear(lp.gain_bob);
  auto u2v = [&](Vec3 uav, double shadow, channel::ComplexGain h) {
    const double d = std::max(distance(uav, mu), cfg.min_link_distance);
    return channel::rician_compose(channel::loss_db_to_gain(channel::u2v_pathloss_db(d, lp, shadow)),
                                   lp.rician_factor, h);
  };
  auto u2u = [&](Vec3 a, Vec3 b) {
    const double d = std::max(distance(a, b), cfg.min_link_distance);
    return channel::loss_db_to_gain(channel::u2u_pathloss_db(d, lp.carrier_freq));
  };

  const channel::ComplexGain c_am = u2v(n.alice.position, noise.shadow_am, noise.h_am);
  std::vector<channel::JamLink> jams(k);
  for (std::size_t i = 0; i < k; ++i) {
    jams[i] = {n.bobs[i].power, u2v(n.bobs[i].position, noise.shadow_bm[i], noise.h_bm[i])};
    info.interference.push_back(jams[i].p_b * g_b * std::norm(jams[i].c_bm));
  }
  info.r_m = channel::rate_mu_multi(n.alice.power, c_am, jams, lp);
  for (std::size_t i = 0; i < k; ++i) {
    const double r_e =
        channel::rate_eve(n.alice.power, n.bobs[i].power, u2u(n.alice.position, n.eves[i]), u2u(n.bobs[i].position, n.eves[i]), lp);
    info.r_e.push_back(r_e);
    info.c_s_pair.push_back(channel::secrecy_rate(info.r_m, r_e));
    info.c_s_signed.push_back(info.r_m - r_e);
  }
  info.c_s_signed_min = minmax_secrecy(info.c_s_signed);

  RewardBreakdown& b = info.breakdown;
  b.c_s = minmax_secrecy(info.c_s_pair);
  info.w1_fired = info.r_m <= cfg.r_min;
  b.w1 = penalty_w1(info.r_m, cfg.r_min, cfg.w1_mode);
  const double i0 = cfg.i0_mw();
  for (std::size_t i = 0; i < k; ++i) {
    const double w2 = penalty_w2(jams[i].p_b, jams[i].c_bm, g_b, i0);
    if (info.interference[i] > i0) info.w2_fired = true;
    b.w2 += w2;
  }
  b.reward = scalarized_reward(b.c_s, b.e_a, b.e_b, b.w1, b.w2, cfg.reward, cfg.mu2());

  n.slot = w.slot + 1;
  n.done = n.slot > cfg.slots;
  return out;
}

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

/// Visibility draw for one eavesdropper: observed iff u < p_obs.
inline std::optional<Vec3> observe_eve(Vec3 eve, double p_obs, double u) {
  if (u < p_obs) return eve;
  return std::nullopt;
}

template <class URBG>
std::optional<Vec3> observe_eve(Vec3 eve, double p_obs, URBG& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return observe_eve(eve, p_obs, u(rng));
}

/// Normalized state: vessel pose (6), Eve estimates (3k), Alice (3), Bobs (3k),
/// P_A, P_B per Bob. Every feature is mapped affinely onto [-1,1] by its bounds.
inline std::vector<double> build_state_vector(const EnvConfig& cfg, const WorldState& w,
                                              std::span<const Vec3> eve_estimates) {
  if (eve_estimates.size() != cfg.pair_count()) throw std::invalid_argument("build_state_vector: estimate count");
  std::vector<double> s;
  s.reserve(cfg.state_dim());
  auto put = [&](double v, double lo, double hi) { s.push_back(std::clamp(to_unit(v, lo, hi), -1.0, 1.0)); };
  auto put3 = [&](Vec3 p, const Box3& b) {
    put(p.x, b.lo.x, b.hi.x);
    put(p.y, b.lo.y, b.hi.y);
    put(p.z, b.lo.z, b.hi.z);
  };
  constexpr double pi = std::numbers::pi;
  put3(w.vessel.position(), cfg.arena);
  for (int i = 3; i < 6; ++i) put(w.vessel.pose[i], -pi, pi);
  for (Vec3 e : eve_estimates) put3(e, cfg.arena);
  put3(w.alice.position, cfg.alice_box);
  for (std::size_t i = 0; i < cfg.pair_count(); ++i) put3(w.bobs[i].position, cfg.pairs[i].bob_box);
  put(w.alice.power, cfg.p_min, cfg.p_max);
  for (const auto& b : w.bobs) put(b.power, cfg.p_min, cfg.p_max);
  return s;
}

// ---------------------------------------------------------------------------
// Episode driver
// ---------------------------------------------------------------------------

class Environment {
 public:
  struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
  };

  explicit Environment(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  std::vector<double> reset(std::uint64_t seed) {
    rng_.seed(seed);
    world_ = initial_world(cfg_, rng_);
    windows_.assign(cfg_.pair_count(), ObservationWindow(cfg_.window));
    estimates_ = world_.eves;
    observed_.assign(cfg_.pair_count(), true);
    for (std::size_t i = 0; i < windows_.size(); ++i) windows_[i].push_observed(world_.eves[i]);
    started_ = true;
    return state();
  }

  StepResult step(std::span<const double> action) {
    if (!started_) throw ProtocolError("step called before reset");
    const SlotNoise noise = sample_slot_noise(cfg_, rng_);
    SlotOutcome out = transition(cfg_, world_, action, noise);
    world_ = std::move(out.next);
    for (std::size_t i = 0; i < windows_.size(); ++i) {
      const auto seen = observe_eve(world_.eves[i], cfg_.p_obs, noise.observe_u[i]);
      observed_[i] = seen.has_value();
      if (seen) {
        estimates_[i] = *seen;
      } else {
        if (predictor_) {
          estimates_[i] = predictor_(windows_[i]);
          ++predictor_queries_;
        } else {
          estimates_[i] = windows_[i].last_position();
        }
      }
      if (seen)
        windows_[i].push_observed(*seen);
      else
        windows_[i].push_missing();
    }
    return {state(), out.info.breakdown.reward, world_.done, std::move(out.info)};
  }

  /// Side-effect-free evaluation of `action` from the current world under `noise`.
  SlotOutcome simulate(std::span<const double> action, const SlotNoise& noise) const {
    return transition(cfg_, world_, action, noise);
  }

  std::vector<double> state() const { return build_state_vector(cfg_, world_, estimates_); }

  void set_predictor(EvePredictor p) { predictor_ = std::move(p); }
  const EnvConfig& config() const { return cfg_; }
  const WorldState& world() const { return world_; }
  const std::vector<ObservationWindow>& windows() const { return windows_; }
  const std::vector<Vec3>& eve_estimates() const { return estimates_; }
  const std::vector<bool>& eve_observed() const { return observed_; }
  std::size_t state_dim() const { return cfg_.state_dim(); }
  std::size_t action_dim() const { return cfg_.action_dim(); }
  std::size_t predictor_queries() const { return predictor_queries_; }

 private:
  EnvConfig cfg_;
  Rng rng_;
  WorldState world_;
  std::vector<ObservationWindow> windows_;
  std::vector<Vec3> estimates_;
  std::vector<bool> observed_;
  EvePredictor predictor_;
  std::size_t predictor_queries_ = 0;
  bool started_ = false;
};

// ---------------------------------------------------------------------------
// Per-slot trace rows
// ---------------------------------------------------------------------------

inline std::vector<std::string> trace_columns(const EnvConfig& cfg) {
  std::vector<std::string> c{"slot"};
  auto xyz = [&](const std::string& p) {
    for (const char* ax : {"_x", "_y", "_z"}) c.push_back(p + ax);
  };
  xyz("mu");
  xyz("alice");
  const std::size_t k = cfg.pair_count();
  for (std::size_t i = 1; i <= k; ++i) xyz("bob" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) xyz("eve" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) xyz("eve" + std::to_string(i) + "_est");
  for (std::size_t i = 1; i <= k; ++i) c.push_back("eve" + std::to_string(i) + "_observed");
  c.push_back("p_a");
  for (std::size_t i = 1; i <= k; ++i) c.push_back("p_b" + std::to_string(i));
  c.push_back("r_m");
  for (std::size_t i = 1; i <= k; ++i) c.push_back("r_e" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) c.push_back("c_s" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) c.push_back("c_s_signed" + std::to_string(i));
  for (const char* s : {"c_s", "c_s_signed", "e_a", "e_b", "w1", "w2", "reward"}) c.push_back(s);
  return c;
}

/// Row matching trace_columns() for the slot that produced `world` and `info`.
inline std::vector<double> trace_values(const Environment& env, const StepInfo& info) {
  const WorldState& w = env.world();
  std::vector<double> v{static_cast<double>(w.slot - 1)};
  auto xyz = [&](Vec3 p) { v.insert(v.end(), {p.x, p.y, p.z}); };
  xyz(w.mu());
  xyz(w.alice.position);
  for (const auto& b : w.bobs) xyz(b.position);
  for (Vec3 e : w.eves) xyz(e);
  for (Vec3 e : env.eve_estimates()) xyz(e);
  for (bool o : env.eve_observed()) v.push_back(o ? 1.0 : 0.0);
  v.push_back(w.alice.power);
  for (const auto& b : w.bobs) v.push_back(b.power);
  v.push_back(info.r_m);
  v.insert(v.end(), info.r_e.begin(), info.r_e.end());
  v.insert(v.end(), info.c_s_pair.begin(), info.c_s_pair.end());
  v.insert(v.end(), info.c_s_signed.begin(), info.c_s_signed.end());
  const auto& b = info.breakdown;
  v.insert(v.end(), {b.c_s, info.c_s_signed_min, b.e_a, b.e_b, b.w1, b.w2, b.reward});
  return v;
}

}  // namespace marsec
