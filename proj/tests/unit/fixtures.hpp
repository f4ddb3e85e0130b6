#pragma once

#include "orbemu/kinematics.hpp"

#include <random>

namespace fixtures {

using namespace orbemu;

// Two unit links about z, TCP at the end of the second link.
inline SerialChain planar_2r(double tip_mass = 0.0) {
  SerialChain c;
  ChainLink a;
  ChainLink b;
  b.parent_transform = Pose::from_translation(Vec3(1, 0, 0));
  b.mass = tip_mass;
  b.com = Vec3(1, 0, 0);
  c.links = {a, b};
  c.tcp_offset = Pose::from_translation(Vec3(1, 0, 0));
  return c;
}

inline VecX random_q(std::mt19937_64& rng, std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  VecX q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = u(rng);
  return q;
}

inline Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

}  // namespace fixtures
