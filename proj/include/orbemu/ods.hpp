/**
 * @file ods.hpp
 * @brief Orbital dynamics: Clohessy-Wiltshire translation plus rigid-body attitude in the
 *        rotating observer frame R (x radial, y along-track, z orbit normal).
 */

#pragma once

#include "orbemu/types.hpp"

#include <string>
#include <vector>

namespace orbemu {

struct FrameMapping;

constexpr double kEarthMu = 3.986004418e14;        // m^3/s^2
constexpr double kEarthRadius = 6378137.0;         // m, equatorial

struct OrbitParams {
  double mu = kEarthMu;
  double a = kEarthRadius + 800e3;
  bool gravity_gradient = false;  ///< add 3 Omega^2 c x (I c) to the body torque

  double omega() const;
  static OrbitParams from_altitude(double altitude_m);
  void validate() const;
};

struct SatelliteBody {
  std::string name = "sat";
  double mass = 1.0;
  Vec3 inertia_principal = Vec3::Ones();
  double collision_radius = 0.15;

  /// 1 kg uniform 0.2 x 0.2 x 0.1 m cuboid (4U, 2x2).
  static SatelliteBody cubesat_4u(std::string name);
  void validate() const;
};

struct SatelliteState {
  Vec3 rho = Vec3::Zero();         ///< m, in R
  Vec3 rho_dot = Vec3::Zero();     ///< m/s, in R
  Quat eps = Quat::Identity();     ///< body -> R
  Vec3 omega_body = Vec3::Zero();  ///< rad/s, body frame

  Pose pose() const { return {rho, eps}; }
};

struct TranslationalState {
  Vec3 rho = Vec3::Zero();
  Vec3 rho_dot = Vec3::Zero();
};

/// CW acceleration with velocity coupling; `wrench_R` must be tagged R.
Vec3 cw_acceleration(const SatelliteState& state, const Wrench& wrench_R, const OrbitParams& params, double mass);

/// Euler's rigid-body equations about principal axes.
Vec3 attitude_rates(const Vec3& omega_body, const Vec3& torque_body, const SatelliteBody& body);

/// eps_dot = 1/2 Q(eps) [omega; 0], returned as (x, y, z, w).
Vec4 quat_rate(const Quat& eps, const Vec3& omega_body);

Mat3 quat_to_rotation(const Quat& eps);

/// Gravity-gradient torque in the body frame for nadir = -x of R.
Vec3 gravity_gradient_torque(const Quat& eps, const SatelliteBody& body, double omega);

/**
 * @brief One classical RK4 step of (rho, rho_dot, eps, omega) under a zero-order-held wrench.
 *
 * The R-frame torque is rotated into the body frame with C^T at every stage. The quaternion
 * is renormalized after the step.
 */
SatelliteState propagate(const SatelliteState& state, const Wrench& wrench_R, const SatelliteBody& body,
                         const OrbitParams& params, double dt);

/// Closed-form force-free CW solution.
TranslationalState cw_analytic(const TranslationalState& state0, double t, double omega);

struct TimedState {
  double t = 0.0;
  SatelliteState state;
};

struct Waypoint {
  double t = 0.0;
  Pose pose;  ///< lab frame TCP target
};

/**
 * @brief Uniform-in-time samples of a propagated history mapped to TCP targets.
 *
 * Sample k sits at t0 + k / rate for k = 0 .. floor((t_end - t0) * rate). Positions are
 * linearly interpolated and orientations slerped between history entries.
 */
std::vector<Waypoint> waypoint_stream(const std::vector<TimedState>& history, double sample_rate,
                                      const FrameMapping& mapping);

}  // namespace orbemu
