// Experiment configuration: one JSON document, strict keys, MARSEC_* overrides.
//
// Resolution order (later wins): profile defaults, config file, environment
// variables, command-line flags. Every leaf of the document can be overridden
// through MARSEC_<PATH>, where PATH is the dotted key path upper-cased with dots
// replaced by underscores (env.reward.mu2 -> MARSEC_ENV_REWARD_MU2). Override
// values are parsed as JSON; anything that fails to parse is taken as a string.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "marsec/agent/sac_cvae.hpp"
#include "marsec/baselines.hpp"
#include "marsec/environment.hpp"
#include "marsec/predictor.hpp"

namespace marsec::experiment {

using Json = nlohmann::ordered_json;

enum class Baseline { sac_cvae, sac, greedy, nonjam };

inline std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::sac_cvae: return "sac-cvae";
    case Baseline::sac: return "sac";
    case Baseline::greedy: return "greedy";
    case Baseline::nonjam: return "nonjam";
  }
  return "?";
}

inline Baseline parse_baseline(const std::string& s) {
  for (Baseline b : {Baseline::sac_cvae, Baseline::sac, Baseline::greedy, Baseline::nonjam})
    if (s == to_string(b)) return b;
  throw ConfigError("unknown baseline '" + s + "' (expected sac-cvae, sac, greedy or nonjam)");
}

struct PredictorSettings {
  bool enabled = true;
  PredictorConfig net;
  int pretrain_episodes = 500;  // per movement pattern
  int pretrain_epochs = 3;
  double lr = 1e-3;
  std::size_t batch = 64;
  int finetune_every = 100;        // episodes
  std::size_t finetune_steps = 50;
  int finetune_history = 100;      // most recent episodes used for fine-tuning

  void validate() const {
    net.validate();
    if (pretrain_episodes < 0 || pretrain_epochs < 0) throw ConfigError("predictor: pretraining counts must be >= 0");
    if (!(lr > 0.0)) throw ConfigError("predictor.lr must be > 0");
    if (batch == 0) throw ConfigError("predictor.batch must be >= 1");
    if (finetune_every < 0 || finetune_history < 1) throw ConfigError("predictor: invalid fine-tuning schedule");
  }
};

struct ExperimentConfig {
  std::string profile = "desk";
  std::uint64_t seed = 0;
  long long iterations = 20000;
  long long eval_interval = 80;
  int eval_episodes = 1;
  int final_eval_episodes = 10;
  Baseline baseline = Baseline::sac_cvae;
  std::string output = "runs/default";
  EnvConfig env;
  agent::AgentConfig agent;
  PredictorSettings predictor;
  GreedyConfig greedy;

  /// Environment actually simulated for this baseline.
  EnvConfig effective_env() const { return baseline == Baseline::nonjam ? nonjam_config(env) : env; }
  agent::AgentConfig effective_agent() const {
    agent::AgentConfig a = agent;
    a.use_cvae = baseline != Baseline::sac;
    return a;
  }

  void validate() const {
    if (profile != "desk" && profile != "paper") throw ConfigError("profile must be 'desk' or 'paper'");
    if (iterations < 0) throw ConfigError("iterations must be >= 0");
    if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
    if (eval_episodes < 1 || final_eval_episodes < 1) throw ConfigError("evaluation episode counts must be >= 1");
    if (output.empty()) throw ConfigError("output must not be empty");
    env.validate();
    agent.validate();
    predictor.validate();
    greedy.validate();
  }
};

inline ExperimentConfig profile_defaults(const std::string& profile) {
  ExperimentConfig c;
  c.profile = profile;
  if (profile == "desk") {
    c.iterations = 20000;
  } else if (profile == "paper") {
    c.iterations = 400000;
  } else {
    throw ConfigError("profile must be 'desk' or 'paper', got '" + profile + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Struct <-> JSON
// ---------------------------------------------------------------------------

namespace detail {

inline Json vec3(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
inline Json box(const Box3& b) { return Json{{"lo", vec3(b.lo)}, {"hi", vec3(b.hi)}}; }

/// Reads a key that the merged document is guaranteed to contain, with a typed check.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  Reader sub(const std::string& k) const { return {at(k), key(k)}; }

  double num(const std::string& k) const {
    const Json& v = at(k);
    if (!v.is_number()) fail(k, "a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(k, "a finite number");
    return d;
  }

  long long integer(const std::string& k) const {
    const double d = num(k);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) fail(k, "an integer");
    return static_cast<long long>(d);
  }

  std::size_t count(const std::string& k) const {
    const long long v = integer(k);
    if (v < 0) fail(k, "a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& k) const {
    const Json& v = at(k);
    if (!v.is_boolean()) fail(k, "true or false");
    return v.get<bool>();
  }

  std::string str(const std::string& k) const {
    const Json& v = at(k);
    if (!v.is_string()) fail(k, "a string");
    return v.get<std::string>();
  }

  std::optional<double> optional_num(const std::string& k) const {
    if (at(k).is_null()) return std::nullopt;
    return num(k);
  }

  std::vector<double> numbers(const std::string& k, std::size_t n) const {
    const Json& v = at(k);
    if (!v.is_array() || (n && v.size() != n)) fail(k, n ? "an array of " + std::to_string(n) + " numbers" : "an array");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) fail(k, "an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Vec3 vec3(const std::string& k) const {
    const auto v = numbers(k, 3);
    return {v[0], v[1], v[2]};
  }

  Box3 box(const std::string& k) const {
    const Reader b = sub(k);
    return {b.vec3("lo"), b.vec3("hi")};
  }

 private:
  const Json& at(const std::string& k) const {
    if (!j_.is_object() || !j_.contains(k)) throw ConfigError("missing key '" + key(k) + "'");
    return j_.at(k);
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  [[noreturn]] void fail(const std::string& k, const std::string& what) const {
    throw ConfigError("'" + key(k) + "' must be " + what);
  }

  const Json& j_;
  std::string path_;
};

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
  using detail::box;
  using detail::vec3;
  const EnvConfig& e = c.env;
  const auto& r = e.reward;
  const auto& v = e.vessel;
  const auto& p = e.propulsion;
  const auto& l = e.link;
  const auto& a = c.agent;
  const auto& pr = c.predictor;
  Json env{
      {"slots", e.slots},
      {"dt", e.dt},
      {"pairs", e.pair_count()},
      {"alice_box", box(e.alice_box)},
      {"arena", box(e.arena)},
      {"max_step", vec3(e.max_step)},
      {"p_min", e.p_min},
      {"p_max", e.p_max},
      {"p_total", e.p_total},
      {"r_min", e.r_min},
      {"i0_dbm", e.i0_dbm},
      {"min_link_distance", e.min_link_distance},
      {"w1_mode", marsec::to_string(e.w1_mode)},
      {"eve_pattern", marsec::to_string(e.eve_pattern)},
      {"p_obs", e.p_obs},
      {"window", e.window},
      {"mu_start", vec3(e.mu_start)},
      {"mu_yaw", e.mu_yaw},
      {"reward",
       {{"omega1", r.omega1},
        {"omega2", r.omega2},
        {"mu1", r.mu1},
        {"mu2", r.mu2 ? Json(*r.mu2) : Json(nullptr)},
        {"mu3", r.mu3},
        {"mu4", r.mu4}}},
      {"eve",
       {{"speed", e.eve_motion.speed},
        {"heading_jitter", e.eve_motion.heading_jitter},
        {"z_min", e.eve_motion.z_min},
        {"z_max", e.eve_motion.z_max},
        {"standoff", e.eve_motion.standoff}}},
      {"vessel",
       {{"mass", v.mass},
        {"inertia_h", v.inertia_h},
        {"inertia_z", v.inertia_z},
        {"damping", Json::array({v.damping_diag[0], v.damping_diag[1], v.damping_diag[2]})},
        {"linear_speed", v.linear_speed},
        {"turn_rate", v.turn_rate},
        {"disturbance_std", v.disturbance_std}}},
      {"propulsion",
       {{"induced_power", p.induced_power},
        {"blade_profile_power", p.blade_profile_power},
        {"tip_speed", p.tip_speed},
        {"mean_induced_speed", p.mean_induced_speed},
        {"drag_coeff", p.drag_coeff},
        {"rotor_solidity", p.rotor_solidity},
        {"rotor_area", p.rotor_area},
        {"air_density", p.air_density},
        {"uav_mass", p.uav_mass},
        {"gravity", p.gravity}}},
      {"link",
       {{"pathloss_index", l.pathloss_index},
        {"ref_distance", l.ref_distance},
        {"ref_param", l.ref_param},
        {"shadow_std", l.shadow_std},
        {"rician_factor", l.rician_factor},
        {"carrier_freq", l.carrier_freq},
        {"gain_alice", l.gain_alice},
        {"gain_bob", l.gain_bob},
        {"noise_power", l.noise_power}}},
  };
  Json agent{
      {"hidden", a.hidden},
      {"latent_dim", a.latent_dim},
      {"latent_bound", a.latent_bound},
      {"gamma", a.gamma},
      {"tau", a.tau},
      {"lr", a.lr},
      {"batch", a.batch},
      {"buffer", a.buffer},
      {"cvae_steps", a.cvae_steps},
      {"kl_weight", a.kl_weight},
      {"recon_std", a.recon_std},
      {"lambda_scale", a.lambda_scale},
      {"init_alpha", a.init_alpha},
      {"target_entropy", a.target_entropy ? Json(*a.target_entropy) : Json(nullptr)},
      {"learn_alpha", a.learn_alpha},
      {"warmup", a.warmup},
      {"updates_per_step", a.updates_per_step},
  };
  Json predictor{
      {"enabled", pr.enabled},
      {"hidden", pr.net.hidden},
      {"residual", pr.net.residual},
      {"motion_scale", pr.net.motion_scale},
      {"pretrain_episodes", pr.pretrain_episodes},
      {"pretrain_epochs", pr.pretrain_epochs},
      {"lr", pr.lr},
      {"batch", pr.batch},
      {"finetune_every", pr.finetune_every},
      {"finetune_steps", pr.finetune_steps},
      {"finetune_history", pr.finetune_history},
  };
  return Json{
      {"profile", c.profile},
      {"seed", c.seed},
      {"iterations", c.iterations},
      {"eval_interval", c.eval_interval},
      {"eval_episodes", c.eval_episodes},
      {"final_eval_episodes", c.final_eval_episodes},
      {"baseline", to_string(c.baseline)},
      {"output", c.output},
      {"env", env},
      {"agent", agent},
      {"predictor", predictor},
      {"greedy", {{"candidates", c.greedy.candidates}}},
  };
}

inline ExperimentConfig from_json(const Json& j) {
  const detail::Reader r(j, "");
  ExperimentConfig c;
  c.profile = r.str("profile");
  c.seed = static_cast<std::uint64_t>(r.count("seed"));
  c.iterations = r.integer("iterations");
  c.eval_interval = r.integer("eval_interval");
  c.eval_episodes = static_cast<int>(r.integer("eval_episodes"));
  c.final_eval_episodes = static_cast<int>(r.integer("final_eval_episodes"));
  c.baseline = parse_baseline(r.str("baseline"));
  c.output = r.str("output");

  const auto e = r.sub("env");
  EnvConfig& env = c.env;
  env.slots = static_cast<int>(e.integer("slots"));
  env.dt = e.num("dt");
  env.pairs = default_pairs(e.count("pairs"));
  env.alice_box = e.box("alice_box");
  env.arena = e.box("arena");
  env.max_step = e.vec3("max_step");
  env.p_min = e.num("p_min");
  env.p_max = e.num("p_max");
  env.p_total = e.num("p_total");
  env.r_min = e.num("r_min");
  env.i0_dbm = e.num("i0_dbm");
  env.min_link_distance = e.num("min_link_distance");
  env.w1_mode = parse_w1_mode(e.str("w1_mode"));
  env.eve_pattern = parse_eve_pattern(e.str("eve_pattern"));
  env.p_obs = e.num("p_obs");
  env.window = e.count("window");
  env.mu_start = e.vec3("mu_start");
  env.mu_yaw = e.num("mu_yaw");
  const auto rw = e.sub("reward");
  env.reward.omega1 = rw.num("omega1");
  env.reward.omega2 = rw.num("omega2");
  env.reward.mu1 = rw.num("mu1");
  env.reward.mu2 = rw.optional_num("mu2");
  env.reward.mu3 = rw.num("mu3");
  env.reward.mu4 = rw.num("mu4");
  const auto ev = e.sub("eve");
  env.eve_motion.speed = ev.num("speed");
  env.eve_motion.heading_jitter = ev.num("heading_jitter");
  env.eve_motion.z_min = ev.num("z_min");
  env.eve_motion.z_max = ev.num("z_max");
  env.eve_motion.standoff = ev.num("standoff");
  const auto vs = e.sub("vessel");
  env.vessel.mass = vs.num("mass");
  env.vessel.inertia_h = vs.num("inertia_h");
  env.vessel.inertia_z = vs.num("inertia_z");
  const auto damp = vs.numbers("damping", 3);
  env.vessel.damping_diag = {damp[0], damp[1], damp[2]};
  env.vessel.linear_speed = vs.num("linear_speed");
  env.vessel.turn_rate = vs.num("turn_rate");
  env.vessel.disturbance_std = vs.num("disturbance_std");
  const auto pp = e.sub("propulsion");
  auto& p = env.propulsion;
  p.induced_power = pp.num("induced_power");
  p.blade_profile_power = pp.num("blade_profile_power");
  p.tip_speed = pp.num("tip_speed");
  p.mean_induced_speed = pp.num("mean_induced_speed");
  p.drag_coeff = pp.num("drag_coeff");
  p.rotor_solidity = pp.num("rotor_solidity");
  p.rotor_area = pp.num("rotor_area");
  p.air_density = pp.num("air_density");
  p.uav_mass = pp.num("uav_mass");
  p.gravity = pp.num("gravity");
  const auto lk = e.sub("link");
  auto& l = env.link;
  l.pathloss_index = lk.num("pathloss_index");
  l.ref_distance = lk.num("ref_distance");
  l.ref_param = lk.num("ref_param");
  l.shadow_std = lk.num("shadow_std");
  l.rician_factor = lk.num("rician_factor");
  l.carrier_freq = lk.num("carrier_freq");
  l.gain_alice = lk.num("gain_alice");
  l.gain_bob = lk.num("gain_bob");
  l.noise_power = lk.num("noise_power");

  const auto ag = r.sub("agent");
  auto& a = c.agent;
  a.hidden.clear();
  for (double h : ag.numbers("hidden", 0)) {
    if (h < 1 || h != std::floor(h)) throw ConfigError("'agent.hidden' entries must be positive integers");
    a.hidden.push_back(static_cast<std::size_t>(h));
  }
  a.latent_dim = ag.count("latent_dim");
  a.latent_bound = ag.num("latent_bound");
  a.gamma = ag.num("gamma");
  a.tau = ag.num("tau");
  a.lr = ag.num("lr");
  a.batch = ag.count("batch");
  a.buffer = ag.count("buffer");
  a.cvae_steps = ag.integer("cvae_steps");
  a.kl_weight = ag.num("kl_weight");
  a.recon_std = ag.num("recon_std");
  a.lambda_scale = ag.num("lambda_scale");
  a.init_alpha = ag.num("init_alpha");
  a.target_entropy = ag.optional_num("target_entropy");
  a.learn_alpha = ag.flag("learn_alpha");
  a.warmup = ag.count("warmup");
  a.updates_per_step = ag.count("updates_per_step");

  const auto pr = r.sub("predictor");
  auto& ps = c.predictor;
  ps.enabled = pr.flag("enabled");
  ps.net.hidden = pr.count("hidden");
  ps.net.residual = pr.flag("residual");
  ps.net.motion_scale = pr.num("motion_scale");
  ps.net.arena = env.arena;
  ps.pretrain_episodes = static_cast<int>(pr.integer("pretrain_episodes"));
  ps.pretrain_epochs = static_cast<int>(pr.integer("pretrain_epochs"));
  ps.lr = pr.num("lr");
  ps.batch = pr.count("batch");
  ps.finetune_every = static_cast<int>(pr.integer("finetune_every"));
  ps.finetune_steps = pr.count("finetune_steps");
  ps.finetune_history = static_cast<int>(pr.integer("finetune_history"));

  c.greedy.candidates = r.sub("greedy").count("candidates");
  c.greedy.seed = c.seed;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Merging, overrides, loading
// ---------------------------------------------------------------------------

/// Overlays `patch` onto `base`, rejecting keys that `base` does not have and
/// values whose JSON kind differs from the default's (null defaults accept numbers).
inline void merge_strict(Json& base, const Json& patch, const std::string& path = "") {
  if (!patch.is_object()) throw ConfigError("configuration " + (path.empty() ? "document" : "'" + path + "'") +
                                            " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown configuration key '" + key + "'");
    Json& slot = base[it.key()];
    const Json& val = it.value();
    if (slot.is_object()) {
      merge_strict(slot, val, key);
      continue;
    }
    const bool ok = (slot.is_number() && val.is_number()) || (slot.is_string() && val.is_string()) ||
                    (slot.is_boolean() && val.is_boolean()) || (slot.is_array() && val.is_array()) ||
                    (slot.is_null() && (val.is_number() || val.is_null())) ||
                    (slot.is_number() && val.is_null() && (key == "env.reward.mu2" || key == "agent.target_entropy"));
    if (!ok) throw ConfigError("configuration key '" + key + "' has the wrong type");
    slot = val;
  }
}

inline std::string env_var_name(const std::string& dotted) {
  std::string out = "MARSEC_";
  for (char ch : dotted) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

/// Dotted paths of every leaf (non-object value) in document order.
inline std::vector<std::string> leaf_paths(const Json& j, const std::string& prefix = "") {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      auto sub = leaf_paths(it.value(), p);
      out.insert(out.end(), sub.begin(), sub.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

inline Json parse_override(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return Json(text);
  }
}

/// Applies MARSEC_* overrides for every leaf of `doc`.
inline void apply_env_overrides(Json& doc, const EnvLookup& lookup) {
  for (const std::string& path : leaf_paths(doc)) {
    const auto v = lookup(env_var_name(path));
    if (!v) continue;
    Json patch = parse_override(*v);
    // Rebuild a nested patch so the same type checks apply.
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
    try {
      merge_strict(doc, patch);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (from " + env_var_name(path) + ")");
    }
  }
}

/// Command-line values that take precedence over everything else.
struct CliOverrides {
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::optional<long long> iterations;
  std::optional<std::string> output;
  std::optional<std::string> baseline;
  std::optional<std::string> pattern;
  std::optional<std::size_t> pairs;
};

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Full resolution: profile defaults < file < MARSEC_* < CLI.
inline ExperimentConfig resolve_config(const std::optional<Json>& file, const CliOverrides& cli,
                                       const EnvLookup& lookup) {
  std::string profile = "desk";
  if (file && file->is_object() && file->contains("profile") && (*file)["profile"].is_string())
    profile = (*file)["profile"].get<std::string>();
  if (auto v = lookup(env_var_name("profile"))) profile = *v;
  if (cli.profile) profile = *cli.profile;
  Json doc = to_json(profile_defaults(profile));
  if (file) merge_strict(doc, *file);
  apply_env_overrides(doc, lookup);
  doc["profile"] = profile;
  // A profile chosen on the command line still brings its own iteration count.
  const bool iterations_set = (file && file->contains("iterations")) || lookup(env_var_name("iterations"));
  if (!iterations_set) doc["iterations"] = profile_defaults(profile).iterations;
  if (cli.seed) doc["seed"] = *cli.seed;
  if (cli.iterations) doc["iterations"] = *cli.iterations;
  if (cli.output) doc["output"] = *cli.output;
  if (cli.baseline) doc["baseline"] = *cli.baseline;
  if (cli.pattern) doc["env"]["eve_pattern"] = *cli.pattern;
  if (cli.pairs) doc["env"]["pairs"] = *cli.pairs;
  return from_json(doc);
}

}  // namespace marsec::experiment
