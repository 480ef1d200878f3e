// LSTM estimate of the eavesdropper's next position from its recent track.
//
// Each window entry becomes four features: the position relative to the most
// recent entry (scaled by `motion_scale`) and the observed flag. The LSTM runs
// oldest to newest and a dense head maps the last hidden state to three outputs.
// In residual mode the outputs are a scaled offset from the most recent entry;
// otherwise they are arena coordinates in [-1,1].
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "marsec/common.hpp"
#include "marsec/environment.hpp"
#include "marsec/nn/adam.hpp"
#include "marsec/nn/checkpoint.hpp"
#include "marsec/nn/layers.hpp"
#include "marsec/nn/lstm.hpp"
#include "marsec/track.hpp"

namespace marsec {

struct PredictorConfig {
  std::size_t hidden = 32;
  bool residual = true;
  double motion_scale = 10.0;  // m
  Box3 arena{{0, 0, 0}, {400, 600, 100}};

  void validate() const {
    if (hidden == 0) throw ConfigError("predictor.hidden must be >= 1");
    if (!(motion_scale > 0.0)) throw ConfigError("predictor.motion_scale must be > 0");
    if (!arena.valid()) throw ConfigError("predictor.arena is invalid");
  }
};

struct TrackSample {
  ObservationWindow window;
  Vec3 next;
};

struct PredictorTrainOptions {
  int epochs = 10;
  double lr = 1e-3;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
};

struct PredictorTrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t steps = 0;
};

class EvePositionPredictor {
 public:
  static constexpr std::size_t kFeatures = 4;

  EvePositionPredictor() : EvePositionPredictor(PredictorConfig{}) {}

  /// Zero-initialised parameters.
  explicit EvePositionPredictor(PredictorConfig cfg)
      : cfg_(std::move(cfg)), lstm_("predictor.lstm", kFeatures, cfg_.hidden) {
    cfg_.validate();
    head_.weight = nn::ParamTensor("predictor.head.weight", 3, cfg_.hidden);
    head_.bias = nn::ParamTensor("predictor.head.bias", 1, 3);
  }

  EvePositionPredictor(PredictorConfig cfg, Rng& rng)
      : cfg_(std::move(cfg)), lstm_("predictor.lstm", kFeatures, cfg_.hidden, rng),
        head_("predictor.head", cfg_.hidden, 3, rng) {
    cfg_.validate();
  }

  const PredictorConfig& config() const { return cfg_; }

  /// Predicted position for the slot after the window's last entry, clamped into the arena.
  Vec3 predict(const ObservationWindow& w) const {
    if (w.empty()) throw std::domain_error("predict_next: empty window");
    const std::size_t hd = cfg_.hidden;
    nn::LstmValues s{nn::Matrix::Zero(1, hd), nn::Matrix::Zero(1, hd)};
    for (std::size_t t = 0; t < w.size(); ++t) s = nn::lstm_cell_predict(features(w, t), s.h, s.c, lstm_);
    const nn::Matrix out = head_.predict(s.h);
    return decode(w, out(0, 0), out(0, 1), out(0, 2));
  }

  /// Adapter for the environment's prediction hook.
  EvePredictor as_callback() const {
    return [this](const ObservationWindow& w) { return predict(w); };
  }

  /// Mean squared error in the encoded output space over `samples` (indices into data).
  nn::Var loss(nn::Tape& t, std::span<const TrackSample> data, std::span<const std::size_t> idx) {
    if (idx.empty()) throw std::invalid_argument("predictor loss: empty batch");
    // Group by window length so each group runs as one batched sequence.
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i : idx) groups[data[i].window.size()].push_back(i);
    std::vector<nn::Var> parts;
    for (const auto& [len, members] : groups) {
      const auto b = static_cast<Eigen::Index>(members.size());
      nn::Var h = t.constant(nn::Matrix::Zero(b, static_cast<Eigen::Index>(cfg_.hidden)));
      nn::Var c = h;
      for (std::size_t step = 0; step < len; ++step) {
        nn::Matrix x(b, kFeatures);
        for (Eigen::Index r = 0; r < b; ++r) x.row(r) = features(data[members[r]].window, step);
        const nn::LstmState s = nn::lstm_cell(t, t.constant(std::move(x)), h, c, lstm_);
        h = s.h;
        c = s.c;
      }
      nn::Matrix target(b, 3);
      for (Eigen::Index r = 0; r < b; ++r) target.row(r) = encode_target(data[members[r]]);
      parts.push_back(nn::sum(nn::square(head_.forward(t, h) - t.constant(std::move(target)))));
    }
    nn::Var total = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) total = total + parts[i];
    return nn::scale(total, 1.0 / (3.0 * static_cast<double>(idx.size())));
  }

  double dataset_loss(std::span<const TrackSample> data) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    double total = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += 1024) {
      const std::size_t n = std::min<std::size_t>(1024, idx.size() - start);
      nn::Tape t;
      total += loss(t, data, std::span(idx).subspan(start, n)).scalar() * static_cast<double>(n);
    }
    return total / static_cast<double>(data.size());
  }

  std::vector<nn::ParamTensor*> params() {
    auto p = lstm_.params();
    p.push_back(&head_.weight);
    p.push_back(&head_.bias);
    return p;
  }

 private:
  nn::Matrix features(const ObservationWindow& w, std::size_t t) const {
    const Vec3 ref = w.back().position;
    const Vec3 d = (1.0 / cfg_.motion_scale) * (w[t].position - ref);
    nn::Matrix x(1, kFeatures);
    x << d.x, d.y, d.z, w[t].observed ? 1.0 : 0.0;
    return x;
  }

  Eigen::RowVector3d encode_target(const TrackSample& s) const {
    if (cfg_.residual) {
      const Vec3 d = (1.0 / cfg_.motion_scale) * (s.next - s.window.back().position);
      return {d.x, d.y, d.z};
    }
    const Box3& a = cfg_.arena;
    return {to_unit(s.next.x, a.lo.x, a.hi.x), to_unit(s.next.y, a.lo.y, a.hi.y), to_unit(s.next.z, a.lo.z, a.hi.z)};
  }

  Vec3 decode(const ObservationWindow& w, double ox, double oy, double oz) const {
    const Box3& a = cfg_.arena;
    Vec3 p = cfg_.residual ? w.back().position + cfg_.motion_scale * Vec3{ox, oy, oz}
                           : Vec3{from_unit(ox, a.lo.x, a.hi.x), from_unit(oy, a.lo.y, a.hi.y),
                                  from_unit(oz, a.lo.z, a.hi.z)};
    return a.clamp(p);
  }

  PredictorConfig cfg_;
  nn::LstmCellParams lstm_;
  nn::Dense head_;
};

/// Adam on minibatch MSE. `steps` caps the number of updates (0 = full epochs).
inline PredictorTrainReport fine_tune(EvePositionPredictor& p, std::span<const TrackSample> data, std::size_t steps,
                                      const PredictorTrainOptions& opt) {
  if (data.empty()) throw std::invalid_argument("predictor training: empty dataset");
  PredictorTrainReport rep;
  rep.initial_loss = p.dataset_loss(data);
  if (steps == 0) {
    rep.final_loss = rep.initial_loss;
    return rep;
  }
  nn::Adam adam(p.params(), {.lr = opt.lr});
  Rng rng(opt.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  while (rep.steps < steps) {
    if (cursor >= order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const std::size_t n = std::min(opt.batch, order.size() - cursor);
    adam.zero_grad();
    nn::Tape t;
    t.backward(p.loss(t, data, std::span(order).subspan(cursor, n)));
    adam.step();
    cursor += n;
    ++rep.steps;
  }
  rep.final_loss = p.dataset_loss(data);
  return rep;
}

inline PredictorTrainReport train_predictor(EvePositionPredictor& p, std::span<const TrackSample> data,
                                            const PredictorTrainOptions& opt) {
  if (data.empty()) throw std::invalid_argument("predictor training: empty dataset");
  const std::size_t per_epoch = (data.size() + opt.batch - 1) / opt.batch;
  return fine_tune(p, data, per_epoch * static_cast<std::size_t>(std::max(0, opt.epochs)), opt);
}

/// One-step errors in meters; `persistence` uses the last window entry instead.
inline double track_rmse(const EvePositionPredictor* p, std::span<const TrackSample> data) {
  if (data.empty()) throw std::invalid_argument("track_rmse: empty dataset");
  double se = 0.0;
  for (const auto& s : data) {
    const Vec3 guess = p ? p->predict(s.window) : s.window.back().position;
    const Vec3 d = guess - s.next;
    se += d.x * d.x + d.y * d.y + d.z * d.z;
  }
  return std::sqrt(se / static_cast<double>(data.size()));
}

/// Eve tracks as the environment would present them: for every slot, the window
/// held before the slot and Eve's true position in that slot. UAVs follow
/// uniformly random actions.
inline std::vector<TrackSample> generate_tracks(const EnvConfig& cfg, int episodes, std::uint64_t seed) {
  Environment env(cfg);
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TrackSample> out;
  std::vector<double> a(cfg.action_dim());
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset(rng());
    bool done = false;
    while (!done) {
      const std::vector<ObservationWindow> before = env.windows();
      for (double& v : a) v = u(rng);
      done = env.step(a).done;
      for (std::size_t i = 0; i < before.size(); ++i) out.push_back({before[i], env.world().eves[i]});
    }
  }
  return out;
}

inline void capture_predictor(nn::Checkpoint& ck, EvePositionPredictor& p) { nn::capture_params(ck, p.params()); }
inline void restore_predictor(const nn::Checkpoint& ck, EvePositionPredictor& p) { nn::restore_params(ck, p.params()); }

}  // namespace marsec
