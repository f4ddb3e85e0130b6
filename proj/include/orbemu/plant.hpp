/**
 * @file plant.hpp
 * @brief Simulated position-controlled arm: first-order joint servo with rate and range
 *        clamps, a noisy F/T sensor, and the safety-stop check.
 */

#pragma once

#include "orbemu/kinematics.hpp"
#include "orbemu/types.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace orbemu {

struct ServoParams {
  double time_constant = 0.02;  ///< s
  double qdot_max = 2.0;        ///< rad/s, every joint
  VecX q_min;                   ///< rad
  VecX q_max;                   ///< rad

  /// Defaults with +-2 pi limits for `dof` joints.
  static ServoParams defaults(std::size_t dof);
  void validate(std::size_t dof) const;
};

struct SensorParams {
  double noise_sigma_force = 0.1;     ///< N
  double noise_sigma_torque = 0.005;  ///< N m
  Wrench bias = Wrench::zero(Frame::Sensor);
  std::uint64_t seed = 0;
  /// First-order low-pass on the reading, s; 0 disables.
  double filter_time_constant = 0.008;
  /// Filtered readings whose force (torque) norm is below this are zeroed before use.
  double deadband_force = 0.15;
  double deadband_torque = 0.0075;

  void validate() const;
};

/// q' = clamp(q + clamp((q_cmd - q) / tau, +-qdot_max) * dt, q_min, q_max)
VecX servo_step(const VecX& q, const VecX& q_cmd, const ServoParams& params, double dt);

/// Seeded noise stream for one sensor; draw n is a pure function of (seed, n).
class SensorNoise {
 public:
  explicit SensorNoise(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  double gaussian(double sigma);
  void reset() { *this = SensorNoise(seed_); }
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t draws_ = 0;
};

/// true + bias + N(0, sigma) per axis; consumes six draws from `noise`.
Wrench measure_wrench(const Wrench& true_wrench, const SensorParams& params, SensorNoise& noise);

/// y + dt / (tau + dt) (x - y); tau = 0 returns x. Both wrenches must share a frame.
Wrench low_pass(const Wrench& previous, const Wrench& reading, double tau, double dt);

/// Zero the force (torque) part when its norm is under the deadband.
Wrench apply_deadband(const Wrench& w, const SensorParams& params);

struct SafetyStatus {
  bool stopped = false;
  std::size_t joint = 0;  ///< zero-based; meaningful only when stopped

  bool ok() const { return !stopped; }
};

/// SAFETY_STOP when any joint is within 1e-9 of a limit.
SafetyStatus check_safety(const VecX& q, const ServoParams& params);

/// Mockup COM pose; the TCP is the mockup COM.
Pose mockup_pose(const SerialChain& chain, const VecX& q);

}  // namespace orbemu
