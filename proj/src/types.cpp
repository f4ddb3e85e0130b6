#include "orbemu/types.hpp"

#include <cmath>

namespace orbemu {

std::string to_string(Frame f) {
  switch (f) {
    case Frame::Sensor: return "SENSOR";
    case Frame::Lab: return "LAB";
    case Frame::R: return "R";
    case Frame::Task: return "TASK";
  }
  return "UNKNOWN";
}

void require_frame(const Wrench& w, Frame expected, const char* where) {
  if (w.frame != expected) {
    throw ContractViolation(std::string(where) + ": wrench expressed in frame " + to_string(w.frame) +
                            ", expected " + to_string(expected));
  }
}

Vec3 rotation_vector(const Quat& q_in) {
  Quat q = q_in.normalized();
  // q and -q are the same rotation; pick w >= 0 for the shortest angle.
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // small-angle limit: angle*axis ~= 2*v
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

Quat axis_angle_quat(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

}  // namespace orbemu
