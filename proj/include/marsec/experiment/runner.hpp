// Training, evaluation and sweeps over ExperimentConfig, with on-disk artifacts:
//   <out>/manifest.json   resolved config and artifact list
//   <out>/metrics.jsonl   one record per evaluation point
//   <out>/checkpoint.txt  agent and predictor parameters
//   <out>/eval/summary.json, <out>/eval/traces/episode_000.csv, ...
#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "marsec/agent/train.hpp"
#include "marsec/baselines.hpp"
#include "marsec/evaluation.hpp"
#include "marsec/experiment/config.hpp"
#include "marsec/experiment/io.hpp"
#include "marsec/predictor.hpp"

namespace marsec::experiment {

namespace fs = std::filesystem;

/// Independent seed for a named purpose (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Episode seeds shared by every approach evaluated under the same experiment seed.
inline std::uint64_t eval_seed(std::uint64_t seed, int episode) { return derive_seed(seed, 1000000 + episode); }
inline std::uint64_t final_eval_seed(std::uint64_t seed, int episode) { return derive_seed(seed, 2000000 + episode); }

// ---------------------------------------------------------------------------
// Predictor pretraining and in-training fine-tuning
// ---------------------------------------------------------------------------

/// Scripted tracks for both movement patterns.
inline std::vector<TrackSample> pretrain_corpus(const ExperimentConfig& c) {
  std::vector<TrackSample> out;
  std::uint64_t stream = 10;
  for (auto pattern : {mobility::EvePattern::approach, mobility::EvePattern::recede}) {
    EnvConfig e = c.env;
    e.eve_pattern = pattern;
    auto d = generate_tracks(e, c.predictor.pretrain_episodes, derive_seed(c.seed, stream++));
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

inline EvePositionPredictor pretrain_predictor(const ExperimentConfig& c) {
  Rng rng(derive_seed(c.seed, 20));
  PredictorConfig net = c.predictor.net;
  net.arena = c.env.arena;
  EvePositionPredictor p(net, rng);
  if (c.predictor.pretrain_episodes > 0 && c.predictor.pretrain_epochs > 0) {
    const auto data = pretrain_corpus(c);
    train_predictor(p, data,
                    {.epochs = c.predictor.pretrain_epochs, .lr = c.predictor.lr, .batch = c.predictor.batch,
                     .seed = derive_seed(c.seed, 21)});
  }
  return p;
}

/// Environment wrapper that keeps the Eve tracks of recent episodes.
class TrackRecordingEnv {
 public:
  using StepResult = Environment::StepResult;

  TrackRecordingEnv(EnvConfig cfg, std::size_t history) : env_(std::move(cfg)), history_(history) {}

  std::vector<double> reset(std::uint64_t seed) {
    current_.clear();
    return env_.reset(seed);
  }

  StepResult step(std::span<const double> a) {
    const std::vector<ObservationWindow> before = env_.windows();
    StepResult r = env_.step(a);
    for (std::size_t i = 0; i < before.size(); ++i) current_.push_back({before[i], env_.world().eves[i]});
    if (r.done) {
      episodes_.push_back(std::move(current_));
      current_.clear();
      while (episodes_.size() > history_) episodes_.pop_front();
    }
    return r;
  }

  std::vector<TrackSample> recent() const {
    std::vector<TrackSample> out;
    for (const auto& e : episodes_) out.insert(out.end(), e.begin(), e.end());
    return out;
  }

  Environment& inner() { return env_; }
  std::size_t state_dim() const { return env_.state_dim(); }
  std::size_t action_dim() const { return env_.action_dim(); }

 private:
  Environment env_;
  std::size_t history_;
  std::vector<TrackSample> current_;
  std::deque<std::vector<TrackSample>> episodes_;
};

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct TrainedModel {
  std::unique_ptr<agent::SacAgent> agent;  // null for greedy
  std::unique_ptr<EvePositionPredictor> predictor;  // null when disabled or greedy
  std::vector<Json> metrics;
};

inline bool uses_agent(const ExperimentConfig& c) { return c.baseline != Baseline::greedy; }

inline std::unique_ptr<agent::SacAgent> make_agent(const ExperimentConfig& c) {
  const EnvConfig e = c.effective_env();
  return std::make_unique<agent::SacAgent>(e.state_dim(), e.action_dim(), c.effective_agent(), derive_seed(c.seed, 30));
}

inline Environment make_env(const ExperimentConfig& c, const EvePositionPredictor* p) {
  Environment env(c.effective_env());
  if (p) env.set_predictor(p->as_callback());
  return env;
}

inline Policy model_policy(const ExperimentConfig& c, const TrainedModel& m, int episode) {
  if (!uses_agent(c)) return greedy_policy({.candidates = c.greedy.candidates, .seed = derive_seed(c.seed, 40 + episode)});
  return agent_policy(*m.agent);
}

inline std::vector<EpisodeRecord> evaluate_model(const ExperimentConfig& c, const TrainedModel& m, int episodes,
                                                 bool keep_rows, std::uint64_t (*seed_of)(std::uint64_t, int) = final_eval_seed) {
  std::vector<EpisodeRecord> out;
  for (int e = 0; e < episodes; ++e) {
    Environment env = make_env(c, m.predictor.get());
    out.push_back(run_episode(env, seed_of(c.seed, e), model_policy(c, m, e), keep_rows));
  }
  return out;
}

inline Json metrics_record(long long iteration, const std::vector<EpisodeRecord>& eps, const agent::UpdateStats& u) {
  auto mean = [&](auto f) {
    double s = 0.0;
    for (const auto& e : eps) s += f(e.totals);
    return s / static_cast<double>(eps.size());
  };
  auto num_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{
      {"iteration", iteration},
      {"eval_return", mean([](const EpisodeTotals& t) { return t.reward; })},
      {"total_secrecy", mean([](const EpisodeTotals& t) { return t.secrecy; })},
      {"total_secrecy_signed", mean([](const EpisodeTotals& t) { return t.secrecy_signed; })},
      {"total_energy", mean([](const EpisodeTotals& t) { return t.energy(); })},
      {"objective", mean([](const EpisodeTotals& t) { return t.objective; })},
      {"w1_count", mean([](const EpisodeTotals& t) { return double(t.w1_count); })},
      {"w2_count", mean([](const EpisodeTotals& t) { return double(t.w2_count); })},
      {"alpha", num_or_null(u.alpha)},
      {"loss_q", num_or_null(u.q_loss)},
      {"loss_v", num_or_null(u.v_loss)},
      {"loss_policy", num_or_null(u.policy_loss)},
      {"loss_cvae", num_or_null(u.cvae_loss)},
      {"loss_alpha", num_or_null(u.alpha_loss)},
  };
}

/// Trains the configured agent. `pretrained` (if given) replaces predictor
/// pretraining; it must come from pretrain_predictor() on an equivalent config
/// for results to match a standalone run.
inline TrainedModel train_model(const ExperimentConfig& c, const EvePositionPredictor* pretrained = nullptr,
                                const std::function<void(const Json&)>& on_record = {}) {
  if (!uses_agent(c)) throw ConfigError("the greedy baseline has no training phase; use eval");
  TrainedModel m;
  if (c.predictor.enabled)
    m.predictor = std::make_unique<EvePositionPredictor>(pretrained ? *pretrained : pretrain_predictor(c));
  m.agent = make_agent(c);

  TrackRecordingEnv env(c.effective_env(), static_cast<std::size_t>(c.predictor.finetune_history));
  if (m.predictor) env.inner().set_predictor(m.predictor->as_callback());

  agent::TrainHooks<TrackRecordingEnv> hooks;
  hooks.evaluate = [&](agent::SacAgent&, long long it) {
    agent::EvalPoint p;
    p.iteration = it;
    const auto eps = evaluate_model(c, m, c.eval_episodes, false, eval_seed);
    p.value = 0.0;
    for (const auto& e : eps) p.value += e.totals.reward / static_cast<double>(eps.size());
    m.metrics.push_back(metrics_record(it, eps, {}));
    return p;
  };
  hooks.on_eval = [&](const agent::EvalPoint&, const agent::UpdateStats& u) {
    Json& rec = m.metrics.back();
    const Json fresh = metrics_record(rec["iteration"].get<long long>(), {}, u);
    for (const char* k : {"alpha", "loss_q", "loss_v", "loss_policy", "loss_cvae", "loss_alpha"}) rec[k] = fresh[k];
    if (on_record) on_record(rec);
  };
  if (m.predictor && c.predictor.finetune_every > 0 && c.predictor.finetune_steps > 0) {
    hooks.on_episode_end = [&](long long episode, TrackRecordingEnv& e) {
      if (episode % c.predictor.finetune_every != 0) return;
      const auto data = e.recent();
      if (data.empty()) return;
      fine_tune(*m.predictor, data, c.predictor.finetune_steps,
                {.lr = c.predictor.lr, .batch = c.predictor.batch,
                 .seed = derive_seed(c.seed, 50 + static_cast<std::uint64_t>(episode))});
    };
  }
  agent::train_agent(env, *m.agent, {.iterations = c.iterations, .eval_interval = c.eval_interval, .seed = derive_seed(c.seed, 31)},
                     hooks);
  return m;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

inline void save_model(const fs::path& p, const ExperimentConfig& c, TrainedModel& m) {
  nn::Checkpoint ck;
  ck.meta["baseline"] = to_string(c.baseline);
  ck.meta["pairs"] = std::to_string(c.env.pair_count());
  ck.meta["predictor"] = m.predictor ? "1" : "0";
  if (m.agent) m.agent->save(ck);
  if (m.predictor) capture_predictor(ck, *m.predictor);
  auto out = open_out(p);
  nn::write_checkpoint(out, ck);
  if (!out) throw std::ios_base::failure("write failed for '" + p.string() + "'");
}

/// Throws nn::CheckpointError when the checkpoint does not fit the configuration.
inline TrainedModel load_model(const fs::path& p, const ExperimentConfig& c) {
  TrainedModel m;
  if (!uses_agent(c)) return m;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read checkpoint '" + p.string() + "'");
  const nn::Checkpoint ck = nn::read_checkpoint(in);
  auto meta = [&](const std::string& k) {
    auto it = ck.meta.find(k);
    return it == ck.meta.end() ? std::string("<missing>") : it->second;
  };
  if (meta("baseline") != to_string(c.baseline))
    throw nn::CheckpointError("incompatible checkpoint: trained for baseline '" + meta("baseline") + "', config says '" +
                              to_string(c.baseline) + "'");
  if (meta("pairs") != std::to_string(c.env.pair_count()))
    throw nn::CheckpointError("incompatible checkpoint: trained with " + meta("pairs") + " pairs, config has " +
                              std::to_string(c.env.pair_count()));
  m.agent = make_agent(c);
  m.agent->load(ck);
  if (meta("predictor") == "1" && c.predictor.enabled) {
    PredictorConfig net = c.predictor.net;
    net.arena = c.env.arena;
    m.predictor = std::make_unique<EvePositionPredictor>(net);
    try {
      restore_predictor(ck, *m.predictor);
    } catch (const std::exception& e) {
      throw nn::CheckpointError(std::string("incompatible checkpoint: ") + e.what());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Summaries and artifact-writing commands
// ---------------------------------------------------------------------------

inline Json mean_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return Json{{"mean", mean}, {"std", v.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0}};
}

inline Json summarize(const ExperimentConfig& c, const std::vector<EpisodeRecord>& eps) {
  auto col = [&](auto f) {
    std::vector<double> v;
    for (const auto& e : eps) v.push_back(f(e.totals));
    return mean_std(v);
  };
  return Json{
      {"baseline", to_string(c.baseline)},
      {"pattern", marsec::to_string(c.env.eve_pattern)},
      {"pairs", c.env.pair_count()},
      {"seed", c.seed},
      {"episodes", eps.size()},
      {"total_secrecy", col([](const EpisodeTotals& t) { return t.secrecy; })},
      {"total_secrecy_signed", col([](const EpisodeTotals& t) { return t.secrecy_signed; })},
      {"total_energy", col([](const EpisodeTotals& t) { return t.energy(); })},
      {"objective", col([](const EpisodeTotals& t) { return t.objective; })},
      {"reward", col([](const EpisodeTotals& t) { return t.reward; })},
      {"min_pair_secrecy", col([](const EpisodeTotals& t) { return t.min_pair_secrecy(); })},
      {"min_pair_secrecy_signed", col([](const EpisodeTotals& t) { return t.min_pair_secrecy_signed(); })},
      {"w1_count", col([](const EpisodeTotals& t) { return double(t.w1_count); })},
      {"w2_count", col([](const EpisodeTotals& t) { return double(t.w2_count); })},
  };
}

inline void write_json(const fs::path& p, const Json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
  if (!out) throw std::ios_base::failure("write failed for '" + p.string() + "'");
}

inline Json manifest(const ExperimentConfig& c, const std::vector<std::string>& artifacts) {
  return Json{{"marsec_manifest", 1}, {"config", to_json(c)}, {"artifacts", artifacts}};
}

/// If `doc` is a run manifest, returns its embedded config; otherwise `doc` itself.
inline Json config_document(const Json& doc) {
  if (doc.is_object() && doc.contains("marsec_manifest")) {
    if (!doc.contains("config")) throw ConfigError("manifest has no 'config' section");
    return doc.at("config");
  }
  return doc;
}

/// Trains and writes manifest, metrics and checkpoint into c.output.
inline TrainedModel run_train(const ExperimentConfig& c, const EvePositionPredictor* pretrained = nullptr) {
  if (!uses_agent(c)) throw ConfigError("the greedy baseline has no training phase; use eval");
  const fs::path dir(c.output);
  fs::create_directories(dir);
  write_json(dir / "manifest.json", manifest(c, {"metrics.jsonl", "checkpoint.txt"}));
  auto metrics = open_out(dir / "metrics.jsonl");
  TrainedModel m = train_model(c, pretrained, [&](const Json& rec) { metrics << rec.dump() << '\n'; });
  metrics.flush();
  if (!metrics) throw std::ios_base::failure("write failed for metrics.jsonl");
  save_model(dir / "checkpoint.txt", c, m);
  return m;
}

/// Deterministic evaluation episodes; writes one trace per episode and a summary.
inline Json run_eval(const ExperimentConfig& c, const TrainedModel& m, int episodes, const fs::path& out_dir) {
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  const auto eps = evaluate_model(c, m, episodes, true);
  const auto cols = trace_columns(c.effective_env());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    Table t{cols, {}};
    for (const auto& r : eps[e].rows) t.rows.push_back(fmt_row(r));
    char name[32];
    std::snprintf(name, sizeof name, "episode_%03zu.csv", e);
    write_table(out_dir / "traces" / name, t);
  }
  Json s = summarize(c, eps);
  write_json(out_dir / "summary.json", s);
  return s;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
  std::vector<std::uint64_t> seeds{0};
  std::vector<Baseline> baselines{Baseline::sac_cvae, Baseline::sac, Baseline::greedy, Baseline::nonjam};
  std::vector<mobility::EvePattern> patterns{mobility::EvePattern::approach, mobility::EvePattern::recede};
};

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c{"baseline",        "pattern",         "seed",
                                          "total_secrecy",   "total_secrecy_signed", "total_energy",
                                          "objective",       "min_pair_secrecy", "min_pair_secrecy_signed"};
  return c;
}

/// Runs every (seed, baseline, pattern) combination under base.output and
/// writes base.output/sweep.csv with one row per run.
inline Table run_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  Table table{sweep_columns(), {}};
  for (std::uint64_t seed : spec.seeds) {
    ExperimentConfig seeded = base;
    seeded.seed = seed;
    seeded.greedy.seed = seed;
    std::unique_ptr<EvePositionPredictor> pre;
    if (seeded.predictor.enabled) pre = std::make_unique<EvePositionPredictor>(pretrain_predictor(seeded));
    for (Baseline b : spec.baselines)
      for (auto pattern : spec.patterns) {
        ExperimentConfig c = seeded;
        c.baseline = b;
        c.env.eve_pattern = pattern;
        c.output = (fs::path(base.output) / (to_string(b) + "_" + marsec::to_string(pattern) + "_s" + std::to_string(seed))).string();
        TrainedModel m = uses_agent(c) ? run_train(c, pre.get()) : TrainedModel{};
        if (!uses_agent(c)) write_json(fs::path(c.output) / "manifest.json", manifest(c, {}));
        const Json s = run_eval(c, m, c.final_eval_episodes, fs::path(c.output) / "eval");
        table.rows.push_back({to_string(b), marsec::to_string(pattern), std::to_string(seed),
                              fmt(s["total_secrecy"]["mean"].get<double>()),
                              fmt(s["total_secrecy_signed"]["mean"].get<double>()),
                              fmt(s["total_energy"]["mean"].get<double>()), fmt(s["objective"]["mean"].get<double>()),
                              fmt(s["min_pair_secrecy"]["mean"].get<double>()),
                              fmt(s["min_pair_secrecy_signed"]["mean"].get<double>())});
      }
  }
  write_table(fs::path(base.output) / "sweep.csv", table);
  return table;
}

}  // namespace marsec::experiment
