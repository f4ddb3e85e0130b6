#include "orbemu/frames.hpp"

#include <cmath>

namespace orbemu {

void FrameMapping::validate() const {
  if (!(position_scale > 0)) throw ContractViolation("mapping.position_scale must be > 0");
  if (!(torque_scale >= 1)) throw ContractViolation("mapping.torque_scale must be >= 1");
  if (std::abs(lab_from_R.orientation.norm() - 1.0) > 1e-9) {
    throw ContractViolation("mapping.lab_from_R orientation is not a unit quaternion");
  }
}

Pose sat_to_tcp(const SatelliteState& state, const FrameMapping& m) {
  return m.lab_from_R * Pose{state.rho / m.position_scale, state.eps};
}

Vec6 sat_twist_to_lab(const SatelliteState& state, const FrameMapping& m) {
  const Mat3 r = m.lab_from_R.rotation();
  Vec6 t;
  t << r * state.rho_dot / m.position_scale, r * (quat_to_rotation(state.eps) * state.omega_body);
  return t;
}

SatelliteState tcp_to_sat(const Pose& pose, const Vec6& twist, const FrameMapping& m) {
  const Pose in_r = m.lab_from_R.inverse() * pose;
  const Mat3 rt = m.lab_from_R.rotation().transpose();
  SatelliteState s;
  s.rho = in_r.position * m.position_scale;
  s.eps = in_r.orientation;
  s.rho_dot = rt * twist.head<3>() * m.position_scale;
  s.omega_body = quat_to_rotation(s.eps).transpose() * (rt * twist.tail<3>());
  return s;
}

Wrench wrench_sensor_to_R(const Wrench& w, const Pose& tcp_pose, const FrameMapping& m) {
  require_frame(w, Frame::Sensor, "wrench_sensor_to_R");
  const Pose& ts = m.tcp_from_sensor;
  const Vec3 f_tcp = ts.orientation * w.force;
  const Vec3 t_tcp = ts.orientation * w.torque + ts.position.cross(f_tcp);
  const Mat3 r_from_tcp = m.lab_from_R.rotation().transpose() * tcp_pose.rotation();
  Wrench out;
  out.frame = Frame::R;
  out.force = r_from_tcp * f_tcp;
  out.torque = r_from_tcp * t_tcp / m.torque_scale;
  return out;
}

Wrench wrench_R_to_sensor(const Wrench& w, const Pose& tcp_pose, const FrameMapping& m) {
  require_frame(w, Frame::R, "wrench_R_to_sensor");
  const Mat3 tcp_from_r = tcp_pose.rotation().transpose() * m.lab_from_R.rotation();
  const Vec3 f_tcp = tcp_from_r * w.force;
  const Vec3 t_tcp = tcp_from_r * w.torque;
  const Pose& ts = m.tcp_from_sensor;
  const Mat3 st = ts.rotation().transpose();
  Wrench out;
  out.frame = Frame::Sensor;
  out.force = st * f_tcp;
  out.torque = st * (t_tcp - ts.position.cross(f_tcp));
  return out;
}

}  // namespace orbemu
