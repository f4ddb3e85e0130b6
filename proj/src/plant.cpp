#include "orbemu/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace orbemu {

ServoParams ServoParams::defaults(std::size_t dof) {
  ServoParams p;
  const auto n = static_cast<Eigen::Index>(dof);
  p.q_min = VecX::Constant(n, -2.0 * std::numbers::pi);
  p.q_max = VecX::Constant(n, 2.0 * std::numbers::pi);
  return p;
}

void ServoParams::validate(std::size_t dof) const {
  std::ostringstream errs;
  if (!(time_constant > 0)) errs << "servo.time_constant must be > 0; ";
  if (!(qdot_max > 0)) errs << "servo.qdot_max must be > 0; ";
  const auto n = static_cast<Eigen::Index>(dof);
  if (q_min.size() != n || q_max.size() != n) {
    errs << "servo limits must have " << dof << " entries; ";
  } else if (!(q_min.array() < q_max.array()).all()) {
    errs << "servo.q_min must be < servo.q_max on every joint; ";
  }
  const std::string s = errs.str();
  if (!s.empty()) throw ContractViolation(s.substr(0, s.size() - 2));
}

void SensorParams::validate() const {
  if (!(noise_sigma_force >= 0) || !(noise_sigma_torque >= 0)) {
    throw ContractViolation("sensor noise sigmas must be >= 0");
  }
  if (!(filter_time_constant >= 0)) throw ContractViolation("sensor.filter_time_constant must be >= 0");
  if (!(deadband_force >= 0) || !(deadband_torque >= 0)) throw ContractViolation("sensor deadbands must be >= 0");
  require_frame(bias, Frame::Sensor, "sensor.bias");
}

VecX servo_step(const VecX& q, const VecX& q_cmd, const ServoParams& params, double dt) {
  if (q.size() != q_cmd.size()) throw ContractViolation("servo_step: q and q_cmd sizes differ");
  if (!(dt > 0)) throw ContractViolation("servo_step: dt must be > 0");
  const VecX rate = ((q_cmd - q) / params.time_constant).cwiseMax(-params.qdot_max).cwiseMin(params.qdot_max);
  VecX out = q + rate * dt;
  if (params.q_min.size() == q.size()) out = out.cwiseMax(params.q_min).cwiseMin(params.q_max);
  return out;
}

double SensorNoise::gaussian(double sigma) {
  ++draws_;
  // always draw so the stream position does not depend on sigma
  const double z = normal_(engine_);
  return sigma * z;
}

Wrench measure_wrench(const Wrench& true_wrench, const SensorParams& params, SensorNoise& noise) {
  require_frame(true_wrench, Frame::Sensor, "measure_wrench");
  Wrench out = true_wrench;
  out.force += params.bias.force;
  out.torque += params.bias.torque;
  for (int i = 0; i < 3; ++i) out.force[i] += noise.gaussian(params.noise_sigma_force);
  for (int i = 0; i < 3; ++i) out.torque[i] += noise.gaussian(params.noise_sigma_torque);
  return out;
}

Wrench low_pass(const Wrench& previous, const Wrench& reading, double tau, double dt) {
  if (previous.frame != reading.frame) throw ContractViolation("low_pass: frame mismatch");
  if (!(dt > 0)) throw ContractViolation("low_pass: dt must be > 0");
  const double a = dt / (tau + dt);
  Wrench out = previous;
  out.force += a * (reading.force - previous.force);
  out.torque += a * (reading.torque - previous.torque);
  return out;
}

Wrench apply_deadband(const Wrench& w, const SensorParams& params) {
  Wrench out = w;
  if (out.force.norm() < params.deadband_force) out.force.setZero();
  if (out.torque.norm() < params.deadband_torque) out.torque.setZero();
  return out;
}

SafetyStatus check_safety(const VecX& q, const ServoParams& params) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] - params.q_min[i] <= 1e-9 || params.q_max[i] - q[i] <= 1e-9) {
      return {true, static_cast<std::size_t>(i)};
    }
  }
  return {};
}

Pose mockup_pose(const SerialChain& chain, const VecX& q) { return forward_kinematics(chain, q); }

}  // namespace orbemu
