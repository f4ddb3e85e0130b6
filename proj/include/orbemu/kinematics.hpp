/**
 * @file kinematics.hpp
 * @brief Serial-chain model of the manipulator: forward kinematics, geometric Jacobian,
 *        joint-space inertia.
 *
 * A chain is a list of revolute links, each described by a fixed transform from the
 * parent joint frame followed by a rotation about `joint_axis`:
 *
 *   T_tcp = P_0 * Rot(a_0, q_0) * P_1 * Rot(a_1, q_1) * ... * P_{n-1} * Rot(a_{n-1}, q_{n-1}) * T_offset
 *
 * All Jacobian rows and joint-space quantities are expressed in the chain base frame.
 */

#pragma once

#include "orbemu/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace orbemu {

struct ChainLink {
  Pose parent_transform;              ///< parent joint frame -> this joint frame (before rotation)
  Vec3 joint_axis = Vec3::UnitZ();    ///< revolute axis, unit, in this joint frame
  double mass = 0.0;                  ///< kg
  Vec3 com = Vec3::Zero();            ///< m, in this link frame
  Mat3 inertia = Mat3::Zero();        ///< kg m^2 about com, in this link frame
};

struct SerialChain {
  std::vector<ChainLink> links;
  Pose tcp_offset;  ///< last joint frame -> TCP

  std::size_t dof() const { return links.size(); }

  /// Throws ContractViolation listing the first broken invariant.
  void validate() const;
};

/// Joint configuration; both vectors sized to the chain's joint count.
struct JointState {
  VecX q;
  VecX qdot;

  static JointState at_rest(const VecX& q) { return {q, VecX::Zero(q.size())}; }
};

/// Per-joint world data computed in one forward pass.
struct ChainFrames {
  std::vector<Pose> link;     ///< link frame i in base (after joint rotation)
  std::vector<Vec3> axis;     ///< joint axis i in base
  Pose tcp;
};

ChainFrames compute_frames(const SerialChain& chain, const VecX& q);

Pose forward_kinematics(const SerialChain& chain, const VecX& q);

/// 6xN: rows 0-2 linear TCP velocity, rows 3-5 angular velocity, both in the base frame.
MatX geometric_jacobian(const SerialChain& chain, const VecX& q);

/**
 * @brief Joint-space inertia H(q) by composite-rigid-body accumulation.
 *
 * Composite spatial inertias of the subtrees i..n-1 are accumulated tip to base about the
 * base origin; entry H(j, i), j <= i, is the momentum of subtree i under unit rate of
 * joint i, projected on joint j's axis.
 */
MatX joint_space_inertia(const SerialChain& chain, const VecX& q);

/// Links [begin, end) as a stand-alone chain rooted at link begin's parent frame.
/// The TCP offset is kept only when the slice reaches the tip.
SerialChain slice_chain(const SerialChain& chain, std::size_t begin, std::size_t end);

/**
 * @brief Virtual-model mass conditioning.
 *
 * Tip link gets `tip_mass`/`tip_inertia` with its com at the TCP; every other link gets
 * `link_mass`/`link_inertia` at its joint origin. Kinematics are unchanged.
 */
SerialChain condition_virtual_chain(const SerialChain& chain, double tip_mass, const Mat3& tip_inertia,
                                    double link_mass, const Mat3& link_inertia);

/// Same kinematics, every link set to `mass` (com and inertia shape kept).
SerialChain with_uniform_link_mass(const SerialChain& chain, double mass);

/**
 * @brief Nominal UR10e-like 6R arm with a 0.1 m mockup mount.
 *
 * Link lengths follow the public UR10e catalog DH table; masses/inertias are nominal.
 * The mount rotates the TCP so that the identity TCP orientation points the flange along
 * base +x.
 */
SerialChain bundled_ur10e_chain();

}  // namespace orbemu
