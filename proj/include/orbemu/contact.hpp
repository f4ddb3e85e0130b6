/**
 * @file contact.hpp
 * @brief Sphere-proxy contact between two mockups with a clamped Kelvin-Voigt force law.
 */

#pragma once

#include "orbemu/types.hpp"

#include <optional>
#include <utility>

namespace orbemu {

struct ContactParams {
  double stiffness = 20.0;   ///< N/m
  double damping = 5.0;      ///< N s/m

  void validate() const;
};

struct ContactPoint {
  double depth = 0.0;           ///< m, >= 0
  Vec3 normal = Vec3::UnitX();  ///< unit, body 1 -> body 2
  Vec3 point = Vec3::Zero();    ///< midway through the overlap
};

/// Contact when r1 + r2 - |p2 - p1| >= 0. Throws ContractViolation on coincident centers.
std::optional<ContactPoint> detect(const Pose& p1, double r1, const Pose& p2, double r2);

/**
 * @brief Equal-and-opposite contact forces, tagged R.
 *
 * magnitude = max(0, k depth - c (v_rel . n)), with v_rel = v2 - v1 so that approach
 * (v_rel . n < 0) adds to the spring. Body 2 is pushed along +n, body 1 along -n.
 * Torques are zero for central sphere contact.
 */
std::pair<Wrench, Wrench> contact_wrench(double depth, const Vec3& normal, const Vec3& rel_velocity,
                                         const ContactParams& params);

}  // namespace orbemu
