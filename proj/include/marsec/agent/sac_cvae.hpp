// Soft actor-critic with an advantage-conditioned CVAE action decoder.
//
// In CVAE mode the actor outputs a latent code; the decoder maps (latent,
// condition) to an action, where the condition is the state with the
// advantage tanh(Q - V) appended. Acting always uses the optimistic condition
// (advantage 1). With use_cvae off the agent reduces to plain SAC: the actor
// is a tanh-Gaussian over actions conditioned on the state only.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "marsec/agent/replay_buffer.hpp"
#include "marsec/common.hpp"
#include "marsec/nn/adam.hpp"
#include "marsec/nn/checkpoint.hpp"
#include "marsec/nn/layers.hpp"

namespace marsec::agent {

using nn::Tape;
using nn::Var;

struct AgentConfig {
  bool use_cvae = true;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t latent_dim = 8;
  double latent_bound = 2.0;  // actor latents live in [-b, b]
  double gamma = 0.9;
  double tau = 0.005;
  double lr = 3e-4;
  std::size_t batch = 128;
  std::size_t buffer = 100000;
  long long cvae_steps = -1;  // K; negative means half of the training iterations
  double kl_weight = 0.5;
  double recon_std = 0.1;  // fixed decoder std; large values let the decoder ignore z
  double lambda_scale = 2.5;
  double init_alpha = 0.2;
  std::optional<double> target_entropy;  // default: minus the policy output dimension
  bool learn_alpha = true;
  std::size_t warmup = 1000;
  std::size_t updates_per_step = 1;

  void validate() const {
    if (hidden.empty()) throw ConfigError("agent.hidden must list at least one layer");
    for (std::size_t h : hidden)
      if (h == 0) throw ConfigError("agent.hidden entries must be >= 1");
    if (use_cvae && latent_dim == 0) throw ConfigError("agent.latent_dim must be >= 1");
    if (!(latent_bound > 0.0)) throw ConfigError("agent.latent_bound must be > 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("agent.gamma must be in [0,1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("agent.tau must be in (0,1]");
    if (!(lr > 0.0)) throw ConfigError("agent.lr must be > 0");
    if (batch == 0) throw ConfigError("agent.batch must be >= 1");
    if (buffer < batch) throw ConfigError("agent.buffer must be >= agent.batch");
    if (!(kl_weight >= 0.0)) throw ConfigError("agent.kl_weight must be >= 0");
    if (!(recon_std > 0.0)) throw ConfigError("agent.recon_std must be > 0");
    if (!(lambda_scale > 0.0)) throw ConfigError("agent.lambda_scale must be > 0");
    if (!(init_alpha > 0.0)) throw ConfigError("agent.init_alpha must be > 0");
  }
};

/// NaN marks a quantity that has not been computed yet (or a skipped CVAE step).
struct UpdateStats {
  double cvae_loss = std::nan("");
  double v_loss = std::nan("");
  double q_loss = std::nan("");
  double policy_loss = std::nan("");
  double alpha_loss = std::nan("");
  double alpha = std::nan("");
  double mean_q = std::nan("");
};

/// Reparameterised policy draw: tape version and value version agree exactly.
struct PolicyDraw {
  Var output;    // [B x D], bounded by `bound`
  Var log_prob;  // [B x 1]
};

struct PolicyValues {
  nn::Matrix output;
  nn::Matrix log_prob;
};

inline PolicyDraw draw_policy(Tape& t, nn::Mlp& actor, Var input, const nn::Matrix& eps, double bound) {
  const auto dim = eps.cols();
  const auto [mean, log_std] = nn::split_gaussian_head(actor.forward(t, input), dim);
  const nn::GaussianSample sq = nn::tanh_squash(nn::gaussian_reparam(mean, log_std, eps));
  if (bound == 1.0) return {sq.sample, sq.log_prob};
  return {bound * sq.sample, sq.log_prob - static_cast<double>(dim) * std::log(bound)};
}

inline double softplus_value(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

/// eps == nullptr gives the deterministic (mean) output.
inline PolicyValues policy_values(const nn::Mlp& actor, const nn::Matrix& input, const nn::Matrix* eps,
                                  Eigen::Index dim, double bound) {
  const nn::Matrix head = actor.predict(input);
  const nn::Matrix mean = head.leftCols(dim);
  const nn::Matrix log_std = head.middleCols(dim, dim).cwiseMax(nn::kLogStdMin).cwiseMin(nn::kLogStdMax);
  nn::Matrix u = mean;
  nn::Matrix lp = nn::Matrix::Zero(input.rows(), 1);
  if (eps) {
    u.array() += log_std.array().exp() * eps->array();
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    lp = ((-0.5 * eps->array().square() - half_log_2pi) - log_std.array()).rowwise().sum().matrix();
  }
  nn::Matrix corr(u.rows(), 1);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double c = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
      c += 2.0 * (std::numbers::ln2 - u(i, j) - softplus_value(-2.0 * u(i, j)));
    corr(i, 0) = c;
  }
  lp -= corr;
  lp.array() -= static_cast<double>(dim) * std::log(bound);
  return {bound * u.array().tanh().matrix(), lp};
}

inline nn::Matrix hcat(const nn::Matrix& a, const nn::Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  nn::Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

/// target <- tau * online + (1 - tau) * target.
inline void polyak_update(const std::vector<nn::ParamTensor*>& target, const std::vector<nn::ParamTensor*>& online,
                          double tau) {
  if (target.size() != online.size()) throw std::invalid_argument("polyak: parameter count mismatch");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]->value.rows() != online[i]->value.rows() || target[i]->value.cols() != online[i]->value.cols())
      throw std::invalid_argument("polyak: shape mismatch for " + online[i]->name);
    target[i]->value = tau * online[i]->value + (1.0 - tau) * target[i]->value;
  }
}

/// Per-row KL(N(mean, exp(log_std)^2) || N(0, I)), summed over dimensions.
inline Var gaussian_kl_standard(Var mean, Var log_std) {
  const Var var = nn::exp(2.0 * log_std);
  return nn::sum_cols(0.5 * (nn::square(mean) + var - 1.0) - log_std);
}

class SacAgent {
 public:
  SacAgent(std::size_t state_dim, std::size_t action_dim, AgentConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)), sdim_(state_dim), adim_(action_dim), rng_(seed) {
    cfg_.validate();
    if (state_dim == 0 || action_dim == 0) throw ConfigError("agent: state and action dims must be >= 1");
    const std::size_t pdim = policy_dim();
    const std::size_t cdim = condition_dim();
    actor_ = nn::Mlp("actor", cdim, cfg_.hidden, 2 * pdim, rng_);
    q1_ = nn::Mlp("q1", sdim_ + adim_, cfg_.hidden, 1, rng_);
    q2_ = nn::Mlp("q2", sdim_ + adim_, cfg_.hidden, 1, rng_);
    v_ = nn::Mlp("v", sdim_, cfg_.hidden, 1, rng_);
    v_target_ = v_;
    rename(v_target_.params(), "v_target");
    if (cfg_.use_cvae) {
      encoder_ = nn::Mlp("encoder", adim_ + cdim, cfg_.hidden, 2 * cfg_.latent_dim, rng_);
      decoder_ = nn::Mlp("decoder", cfg_.latent_dim + cdim, cfg_.hidden, adim_, rng_, nn::Activation::relu,
                         nn::Activation::tanh);
    }
    log_alpha_ = nn::ParamTensor("log_alpha", 1, 1);
    log_alpha_.value(0, 0) = std::log(cfg_.init_alpha);
    const nn::AdamConfig ac{.lr = cfg_.lr};
    actor_opt_ = nn::Adam(actor_.params(), ac);
    v_opt_ = nn::Adam(v_.params(), ac);
    q_opt_ = nn::Adam(q_params(), ac);
    alpha_opt_ = nn::Adam({&log_alpha_}, ac);
    if (cfg_.use_cvae) cvae_opt_ = nn::Adam(cvae_params(), ac);
  }

  SacAgent(const SacAgent&) = delete;
  SacAgent& operator=(const SacAgent&) = delete;

  const AgentConfig& config() const { return cfg_; }
  bool uses_cvae() const { return cfg_.use_cvae; }
  std::size_t state_dim() const { return sdim_; }
  std::size_t action_dim() const { return adim_; }
  std::size_t policy_dim() const { return cfg_.use_cvae ? cfg_.latent_dim : adim_; }
  std::size_t condition_dim() const { return sdim_ + (cfg_.use_cvae ? 1 : 0); }
  double target_entropy() const { return cfg_.target_entropy.value_or(-static_cast<double>(policy_dim())); }
  double alpha() const { return std::exp(log_alpha_.value(0, 0)); }
  Rng& rng() { return rng_; }

  /// Iteration after which the CVAE is frozen; resolved by the training loop.
  void set_cvae_steps(long long k) { cvae_steps_ = k; }
  long long cvae_steps() const { return cvae_steps_; }

  // ----- tape-free evaluation -----

  nn::Matrix q_min(const nn::Matrix& s, const nn::Matrix& a) const {
    const nn::Matrix sa = hcat(s, a);
    return q1_.predict(sa).cwiseMin(q2_.predict(sa));
  }
  nn::Matrix value(const nn::Matrix& s) const { return v_.predict(s); }
  nn::Matrix target_value(const nn::Matrix& s) const { return v_target_.predict(s); }

  /// zeta = tanh(min Q(s,a) - V(s)), in (-1, 1).
  nn::Matrix advantage(const nn::Matrix& s, const nn::Matrix& a) const {
    return (q_min(s, a) - value(s)).array().tanh().matrix();
  }

  nn::Matrix condition(const nn::Matrix& s, const nn::Matrix& zeta) const {
    return cfg_.use_cvae ? hcat(s, zeta) : s;
  }
  nn::Matrix optimal_condition(const nn::Matrix& s) const {
    return condition(s, nn::Matrix::Ones(s.rows(), 1));
  }

  /// Action for a batch of states under the optimistic condition; eps == nullptr is deterministic.
  PolicyValues act_values(const nn::Matrix& s, const nn::Matrix* eps) const {
    const nn::Matrix c = optimal_condition(s);
    PolicyValues pv = policy_values(actor_, c, eps, static_cast<Eigen::Index>(policy_dim()),
                                    cfg_.use_cvae ? cfg_.latent_bound : 1.0);
    if (cfg_.use_cvae) pv.output = decoder_.predict(hcat(pv.output, c));
    return pv;
  }

  std::vector<double> select_action(std::span<const double> state, bool explore) {
    if (state.size() != sdim_) throw std::invalid_argument("select_action: state has the wrong size");
    nn::Matrix s(1, static_cast<Eigen::Index>(sdim_));
    for (std::size_t j = 0; j < sdim_; ++j) s(0, static_cast<Eigen::Index>(j)) = state[j];
    nn::Matrix eps;
    if (explore) eps = nn::standard_normal(1, static_cast<Eigen::Index>(policy_dim()), rng_);
    const nn::Matrix a = act_values(s, explore ? &eps : nullptr).output;
    return {a.data(), a.data() + a.size()};
  }

  std::vector<double> greedy_action(std::span<const double> state) const {
    nn::Matrix s(1, static_cast<Eigen::Index>(sdim_));
    for (std::size_t j = 0; j < sdim_; ++j) s(0, static_cast<Eigen::Index>(j)) = state[j];
    const nn::Matrix a = act_values(s, nullptr).output;
    return {a.data(), a.data() + a.size()};
  }

  // ----- losses (noise passed in so they are deterministic functions of the parameters) -----

  /// Reconstruction (squared error) plus weighted KL, averaged over the batch. eps: [B x latent].
  Var cvae_loss(Tape& t, const Batch& b, const nn::Matrix& eps) {
    require_cvae();
    return cvae_loss_on(t, b.a, condition(b.s, advantage(b.s, b.a)), eps);
  }

  /// ELBO with caller-supplied conditions; row i of `c` conditions row i of `a`.
  Var cvae_loss_on(Tape& t, const nn::Matrix& a, const nn::Matrix& c, const nn::Matrix& eps) {
    require_cvae();
    const Var cv = t.constant(c);
    const Var head = encoder_.forward(t, nn::concat_cols({t.constant(a), cv}));
    const auto l = static_cast<Eigen::Index>(cfg_.latent_dim);
    const auto [mean, log_std] = nn::split_gaussian_head(head, l);
    const Var z = mean + nn::exp(log_std) * t.constant(eps);
    const Var recon = decoder_.forward(t, nn::concat_cols({z, cv}));
    const double w = 0.5 / (cfg_.recon_std * cfg_.recon_std);
    const Var per_row =
        w * nn::sum_cols(nn::square(recon - t.constant(a))) + cfg_.kl_weight * gaussian_kl_standard(mean, log_std);
    return nn::mean(per_row);
  }

  /// One Adam step of cvae_loss_on; ignores the K gate.
  double cvae_fit_step(const nn::Matrix& a, const nn::Matrix& c) {
    const nn::Matrix eps = nn::standard_normal(a.rows(), static_cast<Eigen::Index>(cfg_.latent_dim), rng_);
    Tape t;
    const Var l = cvae_loss_on(t, a, c, eps);
    cvae_opt_.zero_grad();
    t.backward(l);
    cvae_opt_.step();
    return l.scalar();
  }

  /// Soft state-value regression toward min Q(s, a*) - alpha log pi. eps: [B x policy_dim].
  Var value_loss(Tape& t, const Batch& b, const nn::Matrix& eps) {
    const PolicyValues pv = act_values(b.s, &eps);
    const nn::Matrix target = q_min(b.s, pv.output) - alpha() * pv.log_prob;
    return 0.5 * nn::mean(nn::square(v_.forward(t, t.constant(b.s)) - t.constant(target)));
  }

  nn::Matrix q_target(const Batch& b) const {
    return (b.r.array() + cfg_.gamma * (1.0 - b.done.array()) * target_value(b.s2).array()).matrix();
  }

  /// Both Q regressions toward r + gamma (1 - done) V_target(s').
  Var q_loss(Tape& t, const Batch& b) {
    const Var y = t.constant(q_target(b));
    const Var sa = t.constant(hcat(b.s, b.a));
    return 0.5 * nn::mean(nn::square(q1_.forward(t, sa) - y)) + 0.5 * nn::mean(nn::square(q2_.forward(t, sa) - y));
  }

  struct PolicyLoss {
    Var loss;
    nn::Matrix log_prob;  // detached, for the temperature update
    double lambda = 1.0;
    double mean_q = 0.0;
  };

  /// eps_opt drives the optimistic-condition draw; eps_cond the batch-condition draw (CVAE only).
  /// lambda is normally 2.5 / mean|Q| and treated as a constant; `fixed_lambda` pins it.
  PolicyLoss policy_loss(Tape& t, const Batch& b, const nn::Matrix& eps_opt, const nn::Matrix& eps_cond,
                         std::optional<double> fixed_lambda = std::nullopt) {
    const double a = alpha();
    const Var s = t.constant(b.s);
    if (!cfg_.use_cvae) {
      const PolicyDraw d = draw_policy(t, actor_, s, eps_opt, 1.0);
      const Var sa = nn::concat_cols({s, d.output});
      const Var q = nn::minimum(q1_.forward(t, sa), q2_.forward(t, sa));
      return {nn::mean(a * d.log_prob - q), d.log_prob.value(), 1.0, q.value().mean()};
    }
    const Var c_opt = t.constant(optimal_condition(b.s));
    const PolicyDraw d_opt = draw_policy(t, actor_, c_opt, eps_opt, cfg_.latent_bound);
    const Var a_opt = decoder_.forward(t, nn::concat_cols({d_opt.output, c_opt}));
    const Var sa = nn::concat_cols({s, a_opt});
    const Var q = nn::minimum(q1_.forward(t, sa), q2_.forward(t, sa));
    const double lambda = fixed_lambda.value_or(cfg_.lambda_scale / std::max(q.value().cwiseAbs().mean(), 1e-6));

    const Var c_batch = t.constant(condition(b.s, advantage(b.s, b.a)));
    const PolicyDraw d_batch = draw_policy(t, actor_, c_batch, eps_cond, cfg_.latent_bound);
    const Var a_batch = decoder_.forward(t, nn::concat_cols({d_batch.output, c_batch}));
    const Var bc = nn::sum_cols(nn::square(t.constant(b.a) - a_batch));
    const Var per_row = (-lambda) * q + bc + a * d_opt.log_prob;
    return {nn::mean(per_row), d_opt.log_prob.value(), lambda, q.value().mean()};
  }

  /// -log_alpha * mean(log_pi + target_entropy); gradient vanishes when log_pi == -target_entropy.
  Var temperature_loss(Tape& t, const nn::Matrix& log_prob) {
    const double m = (log_prob.array() + target_entropy()).mean();
    return -m * t.param(log_alpha_);
  }

  // ----- updates -----

  /// Returns false (no change) once the iteration passes K.
  bool cvae_update(const Batch& b, long long iteration, double* loss_out = nullptr) {
    if (!cfg_.use_cvae || (cvae_steps_ >= 0 && iteration > cvae_steps_)) return false;
    const nn::Matrix eps = nn::standard_normal(b.size(), static_cast<Eigen::Index>(cfg_.latent_dim), rng_);
    Tape t;
    const Var l = cvae_loss(t, b, eps);
    cvae_opt_.zero_grad();
    t.backward(l);
    cvae_opt_.step();
    if (loss_out) *loss_out = l.scalar();
    return true;
  }

  std::pair<double, double> critic_update(const Batch& b) {
    const nn::Matrix eps = nn::standard_normal(b.size(), static_cast<Eigen::Index>(policy_dim()), rng_);
    Tape tv;
    const Var lv = value_loss(tv, b, eps);
    v_opt_.zero_grad();
    tv.backward(lv);
    v_opt_.step();
    Tape tq;
    const Var lq = q_loss(tq, b);
    q_opt_.zero_grad();
    tq.backward(lq);
    q_opt_.step();
    return {lv.scalar(), lq.scalar()};
  }

  PolicyLoss policy_update(const Batch& b, Tape& t) {
    const auto pd = static_cast<Eigen::Index>(policy_dim());
    const nn::Matrix e1 = nn::standard_normal(b.size(), pd, rng_);
    const nn::Matrix e2 = cfg_.use_cvae ? nn::standard_normal(b.size(), pd, rng_) : nn::Matrix();
    PolicyLoss pl = policy_loss(t, b, e1, e2);
    actor_opt_.zero_grad();
    t.backward(pl.loss);
    actor_opt_.step();
    return pl;
  }

  double temperature_update(const nn::Matrix& log_prob) {
    if (!cfg_.learn_alpha) return 0.0;
    Tape t;
    const Var l = temperature_loss(t, log_prob);
    alpha_opt_.zero_grad();
    t.backward(l);
    alpha_opt_.step();
    return l.scalar();
  }

  void set_learning_rate(double lr) {
    for (nn::Adam* o : {&actor_opt_, &v_opt_, &q_opt_, &alpha_opt_, &cvae_opt_}) o->set_lr(lr);
  }

  void polyak() { polyak_update(v_target_.params(), v_.params(), cfg_.tau); }

  /// One full gradient step in the fixed order: CVAE (while active), critics, actor, temperature, target.
  UpdateStats update(const Batch& b, long long iteration) {
    UpdateStats st;
    double cl = std::nan("");
    if (cvae_update(b, iteration, &cl)) st.cvae_loss = cl;
    std::tie(st.v_loss, st.q_loss) = critic_update(b);
    Tape t;
    const PolicyLoss pl = policy_update(b, t);
    st.policy_loss = pl.loss.scalar();
    st.mean_q = pl.mean_q;
    st.alpha_loss = temperature_update(pl.log_prob);
    polyak();
    st.alpha = alpha();
    return st;
  }

  // ----- parameter access -----

  nn::Mlp& actor() { return actor_; }
  nn::Mlp& q1() { return q1_; }
  nn::Mlp& q2() { return q2_; }
  nn::Mlp& v() { return v_; }
  nn::Mlp& v_target() { return v_target_; }
  nn::Mlp& encoder() { return encoder_; }
  nn::Mlp& decoder() { return decoder_; }
  nn::ParamTensor& log_alpha() { return log_alpha_; }
  const nn::Mlp& v_target() const { return v_target_; }

  std::vector<nn::ParamTensor*> q_params() {
    auto p = q1_.params();
    for (auto* x : q2_.params()) p.push_back(x);
    return p;
  }
  std::vector<nn::ParamTensor*> cvae_params() {
    auto p = encoder_.params();
    for (auto* x : decoder_.params()) p.push_back(x);
    return p;
  }
  std::vector<nn::ParamTensor*> all_params() {
    std::vector<nn::ParamTensor*> p;
    for (nn::Mlp* m : {&actor_, &q1_, &q2_, &v_, &v_target_})
      for (auto* x : m->params()) p.push_back(x);
    if (cfg_.use_cvae)
      for (auto* x : cvae_params()) p.push_back(x);
    p.push_back(&log_alpha_);
    return p;
  }

  // ----- checkpoints -----

  void save(nn::Checkpoint& ck) {
    ck.meta["agent.mode"] = cfg_.use_cvae ? "sac-cvae" : "sac";
    ck.meta["agent.state_dim"] = std::to_string(sdim_);
    ck.meta["agent.action_dim"] = std::to_string(adim_);
    ck.meta["agent.latent_dim"] = std::to_string(cfg_.use_cvae ? cfg_.latent_dim : 0);
    ck.meta["agent.hidden"] = hidden_string();
    ck.meta["agent.cvae_steps"] = std::to_string(cvae_steps_);
    nn::capture_params(ck, all_params());
    nn::capture_optimizer(ck, "opt.actor", actor_opt_);
    nn::capture_optimizer(ck, "opt.v", v_opt_);
    nn::capture_optimizer(ck, "opt.q", q_opt_);
    nn::capture_optimizer(ck, "opt.alpha", alpha_opt_);
    if (cfg_.use_cvae) nn::capture_optimizer(ck, "opt.cvae", cvae_opt_);
  }

  /// Throws nn::CheckpointError when the checkpoint belongs to a differently shaped agent.
  void load(const nn::Checkpoint& ck) {
    auto expect = [&](const std::string& key, const std::string& want) {
      const auto it = ck.meta.find(key);
      if (it == ck.meta.end() || it->second != want)
        throw nn::CheckpointError("incompatible checkpoint: " + key + " is '" +
                                  (it == ck.meta.end() ? std::string("<missing>") : it->second) + "', expected '" +
                                  want + "'");
    };
    expect("agent.mode", cfg_.use_cvae ? "sac-cvae" : "sac");
    expect("agent.state_dim", std::to_string(sdim_));
    expect("agent.action_dim", std::to_string(adim_));
    expect("agent.latent_dim", std::to_string(cfg_.use_cvae ? cfg_.latent_dim : 0));
    expect("agent.hidden", hidden_string());
    nn::restore_params(ck, all_params());
    nn::restore_optimizer(ck, "opt.actor", actor_opt_);
    nn::restore_optimizer(ck, "opt.v", v_opt_);
    nn::restore_optimizer(ck, "opt.q", q_opt_);
    nn::restore_optimizer(ck, "opt.alpha", alpha_opt_);
    if (cfg_.use_cvae) nn::restore_optimizer(ck, "opt.cvae", cvae_opt_);
    if (auto it = ck.meta.find("agent.cvae_steps"); it != ck.meta.end()) cvae_steps_ = std::stoll(it->second);
  }

 private:
  void require_cvae() const {
    if (!cfg_.use_cvae) throw ProtocolError("cvae_loss called on a plain SAC agent");
  }

  static void rename(const std::vector<nn::ParamTensor*>& ps, const std::string& prefix) {
    for (auto* p : ps) p->name = prefix + p->name.substr(p->name.find('.'));
  }

  std::string hidden_string() const {
    std::string s;
    for (std::size_t h : cfg_.hidden) s += (s.empty() ? "" : "x") + std::to_string(h);
    return s;
  }

  AgentConfig cfg_;
  std::size_t sdim_, adim_;
  Rng rng_;
  long long cvae_steps_ = -1;
  nn::Mlp actor_, q1_, q2_, v_, v_target_, encoder_, decoder_;
  nn::ParamTensor log_alpha_;
  nn::Adam actor_opt_, v_opt_, q_opt_, alpha_opt_, cvae_opt_;
};

}  // namespace marsec::agent
