// Vessel, UAV and eavesdropper motion plus rotary-wing energy accounting.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "marsec/common.hpp"

namespace marsec::mobility {

// ---------------------------------------------------------------------------
// Vessel: reduced surge/sway/yaw maneuvering model
// ---------------------------------------------------------------------------

/// Pose (x, y, z, roll, pitch, yaw) and body-frame velocities of the marine user.
struct VesselState {
  std::array<double, 6> pose{};      // m, m, m, rad, rad, rad
  std::array<double, 6> velocity{};  // surge, sway, heave (m/s), roll, pitch, yaw rate (rad/s)

  Vec3 position() const { return {pose[0], pose[1], pose[2]}; }
  double yaw() const { return pose[5]; }
};

struct VesselParams {
  double mass = 100.0;        // kg
  double inertia_h = 300.0;   // kg m^2 (roll/pitch; unused by the planar model)
  double inertia_z = 150.0;   // kg m^2
  std::array<double, 3> damping_diag{50.0, 50.0, 75.0};  // surge, sway, yaw
  double linear_speed = 1.0;  // commanded surge speed, m/s
  double turn_rate = 0.5;     // commanded yaw rate, rad/s
  double disturbance_std = 0.0;  // N (N m for yaw), lumped wind/current/wave forcing

  void validate() const {
    if (!(mass > 0.0) || !(inertia_h > 0.0) || !(inertia_z > 0.0))
      throw ConfigError("vessel: mass and inertias must be > 0");
    for (double d : damping_diag)
      if (!(d >= 0.0)) throw ConfigError("vessel: damping must be >= 0");
    if (!(disturbance_std >= 0.0)) throw ConfigError("vessel: disturbance_std must be >= 0");
  }
};

/// Vessel at `start` already cruising at its commanded surge speed and yaw rate.
inline VesselState vessel_at(Vec3 start, double yaw, const VesselParams& p) {
  VesselState s;
  s.pose = {start.x, start.y, start.z, 0.0, 0.0, wrap_angle(yaw)};
  s.velocity = {p.linear_speed, 0.0, 0.0, 0.0, 0.0, p.turn_rate};
  return s;
}

/// Disturbance forces for one step (surge, sway, yaw moment).
using VesselDisturbance = std::array<double, 3>;

template <class URBG>
VesselDisturbance sample_vessel_disturbance(const VesselParams& p, URBG& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  VesselDisturbance d{};
  for (double& f : d) f = p.disturbance_std * n(rng);
  return d;
}

/// Explicit-Euler step with a given disturbance. Surge and yaw are driven towards
/// their commanded values through the damping; sway only decays.
inline VesselState vessel_step(const VesselState& s, const VesselParams& p, double dt, const VesselDisturbance& w) {
  if (!(dt > 0.0)) throw std::domain_error("vessel_step: dt must be > 0");
  VesselState n = s;
  const double u = s.velocity[0];
  const double v = s.velocity[1];
  const double r = s.velocity[5];
  const double psi = s.pose[5];

  n.pose[0] += (u * std::cos(psi) - v * std::sin(psi)) * dt;
  n.pose[1] += (u * std::sin(psi) + v * std::cos(psi)) * dt;
  n.pose[5] = wrap_angle(psi + r * dt);
  n.pose[2] = 0.0;
  n.pose[3] = 0.0;
  n.pose[4] = 0.0;

  const auto& d = p.damping_diag;
  n.velocity[0] = u + dt * (d[0] * (p.linear_speed - u) + w[0]) / p.mass;
  n.velocity[1] = v + dt * (-d[1] * v + w[1]) / p.mass;
  n.velocity[5] = r + dt * (d[2] * (p.turn_rate - r) + w[2]) / p.inertia_z;
  n.velocity[2] = n.velocity[3] = n.velocity[4] = 0.0;
  return n;
}

template <class URBG>
VesselState vessel_step(const VesselState& s, const VesselParams& p, double dt, URBG& rng) {
  return vessel_step(s, p, dt, sample_vessel_disturbance(p, rng));
}

// ---------------------------------------------------------------------------
// UAV kinematics and energy
// ---------------------------------------------------------------------------

struct PropulsionParams {
  double induced_power = 88.6279;        // P_I, W
  double blade_profile_power = 79.8563;  // P_p, W
  double tip_speed = 120.0;              // s_r, m/s
  double mean_induced_speed = 4.03;      // s_m, m/s
  // c_d * r_r * a_r * rho; the reference rotor gives 0.6 * 0.05 * 0.503 * 1.225.
  double drag_coeff = 0.6;
  double rotor_solidity = 0.05;
  double rotor_area = 0.503;   // m^2
  double air_density = 1.225;  // kg/m^3
  double uav_mass = 2.0;       // kg
  double gravity = 9.8;        // m/s^2

  void validate() const {
    for (double v : {induced_power, blade_profile_power, tip_speed, mean_induced_speed, drag_coeff, rotor_solidity,
                     rotor_area, air_density, uav_mass, gravity})
      if (!(v > 0.0)) throw ConfigError("propulsion: all parameters must be > 0");
  }

  double hover_power() const { return induced_power + blade_profile_power; }
};

/// Rotary-wing propulsion power at horizontal speed v_h.
inline double propulsion_power(double v_h, const PropulsionParams& p) {
  if (!(v_h >= 0.0)) throw std::domain_error("propulsion_power: speed must be >= 0");
  const double v2 = v_h * v_h;
  const double sm2 = p.mean_induced_speed * p.mean_induced_speed;
  const double inner = std::sqrt(1.0 + v2 * v2 / (4.0 * sm2 * sm2)) - v2 / (2.0 * sm2);
  const double induced = p.induced_power * std::sqrt(std::max(inner, 0.0));
  const double blade = p.blade_profile_power * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  const double parasite = 0.5 * v2 * v_h * p.drag_coeff * p.rotor_solidity * p.rotor_area * p.air_density;
  return induced + blade + parasite;
}

struct UavKinematics {
  Vec3 position;
  double horiz_speed = 0.0;
  double vert_speed = 0.0;

  double forward_speed() const { return std::hypot(horiz_speed, vert_speed); }
};

/// Kinematics after moving from `prev` to `next` over one slot of length dt.
inline UavKinematics kinematics_from_move(Vec3 prev, Vec3 next, double dt) {
  const Vec3 d = next - prev;
  return {next, d.horizontal_norm() / dt, std::abs(d.z) / dt};
}

/// Energy of one slot: propulsion over dt plus kinetic and potential deltas.
inline double slot_energy(const UavKinematics& prev, const UavKinematics& next, const PropulsionParams& p,
                          double dt) {
  if (!(dt > 0.0)) throw std::domain_error("slot_energy: dt must be > 0");
  const double vf0 = prev.forward_speed();
  const double vf1 = next.forward_speed();
  return propulsion_power(next.horiz_speed, p) * dt + 0.5 * p.uav_mass * (vf1 * vf1 - vf0 * vf0) +
         p.uav_mass * p.gravity * (next.position.z - prev.position.z);
}

/// Moves by `delta` and clamps into the flight box.
inline Vec3 uav_apply_action(Vec3 pos, Vec3 delta, const Box3& box) {
  if (!box.valid()) throw std::invalid_argument("uav_apply_action: invalid box");
  return box.clamp(pos + delta);
}

// ---------------------------------------------------------------------------
// Eavesdropper movement patterns
// ---------------------------------------------------------------------------

enum class EvePattern { approach, recede };

struct EveMotionParams {
  double speed = 1.0;          // m/s
  double heading_jitter = 0.1; // rad, std of the heading perturbation
  double z_min = 50.0;
  double z_max = 70.0;
  double standoff = 30.0;      // minimum distance kept from Alice, m
};

/// Moves Eve horizontally toward or away from the MU with a given heading
/// perturbation, then bounds altitude and pushes it out of Alice's standoff sphere.
inline Vec3 eve_step(Vec3 eve, EvePattern pattern, Vec3 mu, Vec3 alice, const EveMotionParams& p, double dt,
                     double heading_noise) {
  if (!(p.speed >= 0.0)) throw std::domain_error("eve_step: speed must be >= 0");
  Vec3 next = eve;
  const double dx = mu.x - eve.x;
  const double dy = mu.y - eve.y;
  const double dist = std::hypot(dx, dy);
  double step = p.speed * dt;
  if (step > 0.0) {
    double heading = dist > 0.0 ? std::atan2(dy, dx) : 0.0;
    if (pattern == EvePattern::recede) heading += std::numbers::pi;
    heading += heading_noise;
    if (pattern == EvePattern::approach) step = std::min(step, dist);
    next.x += step * std::cos(heading);
    next.y += step * std::sin(heading);
  }
  next.z = std::clamp(next.z, p.z_min, p.z_max);

  const Vec3 off = next - alice;
  const double r = off.norm();
  if (p.standoff > 0.0 && r < p.standoff) {
    const Vec3 dir = r > 0.0 ? (1.0 / r) * off : Vec3{1.0, 0.0, 0.0};
    next = alice + p.standoff * dir;
    next.z = std::clamp(next.z, p.z_min, p.z_max);
  }
  return next;
}

template <class URBG>
Vec3 eve_step(Vec3 eve, EvePattern pattern, Vec3 mu, Vec3 alice, const EveMotionParams& p, double dt, URBG& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return eve_step(eve, pattern, mu, alice, p, dt, p.heading_jitter * n(rng));
}

}  // namespace marsec::mobility
