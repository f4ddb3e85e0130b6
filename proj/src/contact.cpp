#include "orbemu/contact.hpp"

#include <algorithm>

namespace orbemu {

void ContactParams::validate() const {
  if (!(stiffness > 0)) throw ContractViolation("contact.stiffness must be > 0");
  if (!(damping >= 0)) throw ContractViolation("contact.damping must be >= 0");
}

std::optional<ContactPoint> detect(const Pose& p1, double r1, const Pose& p2, double r2) {
  if (!(r1 > 0) || !(r2 > 0)) throw ContractViolation("detect: radii must be > 0");
  const Vec3 d = p2.position - p1.position;
  const double dist = d.norm();
  if (dist == 0.0) throw ContractViolation("detect: coincident centers, contact normal undefined");
  const double depth = (r1 + r2) - dist;
  if (depth < 0.0) return std::nullopt;
  ContactPoint c;
  c.depth = depth;
  c.normal = d / dist;
  c.point = p1.position + c.normal * (r1 - 0.5 * depth);
  return c;
}

std::pair<Wrench, Wrench> contact_wrench(double depth, const Vec3& normal, const Vec3& rel_velocity,
                                         const ContactParams& params) {
  if (depth < 0.0) throw ContractViolation("contact_wrench: depth must be >= 0");
  const double magnitude = std::max(0.0, params.stiffness * depth - params.damping * rel_velocity.dot(normal));
  Wrench on2{magnitude * normal, Vec3::Zero(), Frame::R};
  Wrench on1{-on2.force, Vec3::Zero(), Frame::R};
  return {on1, on2};
}

}  // namespace orbemu
