// Radio propagation and information-rate math for the Alice/Bob/MU/Eve links.
//
// Conventions: distances in meters, carrier frequency in MHz, powers in linear
// mW, gains and losses in dB at the API edge and linear internally, rates in
// bits/s/Hz.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "marsec/common.hpp"

namespace marsec::channel {

struct LinkBudgetParams {
  double pathloss_index = 1.5;   // I_r
  double ref_distance = 2600.0;  // d_r, m
  double ref_param = 116.7;      // P_d, dB
  double shadow_std = 4.0;       // dB; not given in the source table
  double rician_factor = 31.3;   // F_V, linear
  double carrier_freq = 2400.0;  // MHz
  double gain_alice = 8.0;       // dBi
  double gain_bob = 8.0;         // dBi
  double noise_power = -107.0;   // dBm

  void validate() const {
    if (!(ref_distance > 0.0)) throw ConfigError("link budget: ref_distance must be > 0");
    if (!(rician_factor >= 0.0)) throw ConfigError("link budget: rician_factor must be >= 0");
    if (!(carrier_freq > 0.0)) throw ConfigError("link budget: carrier_freq must be > 0");
    if (!(shadow_std >= 0.0)) throw ConfigError("link budget: shadow_std must be >= 0");
  }
};

using ComplexGain = std::complex<double>;

/// Linear power gain of a link (the inverse of its path loss).
struct LinkGain {
  double value = 1.0;

  explicit LinkGain(double v) : value(v) {
    if (!(v > 0.0)) throw std::domain_error("LinkGain must be > 0");
  }
};

inline double db_to_linear(double x) { return std::pow(10.0, x / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Path loss in dB to the equivalent linear power gain, 10^(-PL/10).
inline LinkGain loss_db_to_gain(double loss_db) { return LinkGain(std::pow(10.0, -loss_db / 10.0)); }

/// UAV-to-vessel log-distance loss with an externally drawn shadowing term.
inline double u2v_pathloss_db(double d, const LinkBudgetParams& p, double shadow_db) {
  if (!(d > 0.0)) throw std::domain_error("u2v_pathloss_db: distance must be > 0");
  return 10.0 * p.pathloss_index * std::log10(d / p.ref_distance) + shadow_db + p.ref_param;
}

/// UAV-to-UAV free-space loss, d in meters and f_c in MHz.
inline double u2u_pathloss_db(double d, double f_c) {
  if (!(d > 0.0)) throw std::domain_error("u2u_pathloss_db: distance must be > 0");
  if (!(f_c > 0.0)) throw std::domain_error("u2u_pathloss_db: carrier frequency must be > 0");
  return 20.0 * std::log10(d) + 20.0 * std::log10(f_c) + 20.0 * std::log10(4.0 * std::numbers::pi / 300.0);
}

/// Composite Rician channel for a given scattered component h.
inline ComplexGain rician_compose(LinkGain gain, double rician_factor, ComplexGain h) {
  const double los = std::sqrt(rician_factor / (1.0 + rician_factor));
  const double nlos = std::sqrt(1.0 / (1.0 + rician_factor));
  return std::sqrt(gain.value) * (ComplexGain(los, 0.0) + nlos * h);
}

/// Draws h ~ CN(0, 1), each component N(0, 1/2).
template <class URBG>
ComplexGain sample_cn01(URBG& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

template <class URBG>
ComplexGain rician_sample(LinkGain gain, double rician_factor, URBG& rng) {
  return rician_compose(gain, rician_factor, sample_cn01(rng));
}

namespace detail {
inline double sinr_rate(double signal, double interference, double noise) {
  return std::log1p(signal / (interference + noise)) / std::numbers::ln2;
}
}  // namespace detail

/// Achievable MU rate under Bob's jamming leakage over fading U2V channels.
inline double rate_mu(double p_a, double p_b, ComplexGain c_am, ComplexGain c_bm, const LinkBudgetParams& p) {
  const double signal = p_a * db_to_linear(p.gain_alice) * std::norm(c_am);
  const double jam = p_b * db_to_linear(p.gain_bob) * std::norm(c_bm);
  return detail::sinr_rate(signal, jam, db_to_linear(p.noise_power));
}

/// Achievable Eve rate over deterministic U2U gains.
inline double rate_eve(double p_a, double p_b, LinkGain g_ae, LinkGain g_be, const LinkBudgetParams& p) {
  const double signal = p_a * db_to_linear(p.gain_alice) * g_ae.value;
  const double jam = p_b * db_to_linear(p.gain_bob) * g_be.value;
  return detail::sinr_rate(signal, jam, db_to_linear(p.noise_power));
}

/// A jammer's contribution at the MU: transmit power and its U2V channel.
struct JamLink {
  double p_b = 0.0;
  ComplexGain c_bm{};
};

/// MU rate when several jammers leak onto the MU; their powers add in the denominator.
template <class Range>
double rate_mu_multi(double p_a, ComplexGain c_am, const Range& jammers, const LinkBudgetParams& p) {
  const double signal = p_a * db_to_linear(p.gain_alice) * std::norm(c_am);
  double jam = 0.0;
  for (const JamLink& j : jammers) jam += j.p_b * db_to_linear(p.gain_bob) * std::norm(j.c_bm);
  return detail::sinr_rate(signal, jam, db_to_linear(p.noise_power));
}

inline double secrecy_rate(double r_m, double r_e) { return std::max(0.0, r_m - r_e); }

}  // namespace marsec::channel
