/**
 * @file vfdm.hpp
 * @brief Virtual forward-dynamics Cartesian controller.
 *
 * A PD wrench on the pose error drives a mass-conditioned virtual copy of the arm. Each
 * cycle starts the virtual model from rest, so gravity and velocity-product terms vanish
 * and the joint acceleration is qdd = (H + lambda I)^-1 J^T f. Integrating that
 * acceleration over one virtual step gives the next joint set-point, which makes the
 * model an iterative IK solver.
 */

#pragma once

#include "orbemu/kinematics.hpp"
#include "orbemu/types.hpp"

#include <optional>

namespace orbemu {

struct VfdmParams {
  double kp_trans = 10.0;
  double kd_trans = 0.0;
  double kp_rot = 1.0;
  double kd_rot = 0.0;
  double m_e = 1.0;                          ///< tip link mass, kg
  double m_l = 0.01;                         ///< every other link, kg
  Mat3 I_e = Mat3::Identity();               ///< tip link inertia, kg m^2
  Mat3 I_l = 1e-6 * Mat3::Identity();        ///< every other link, kg m^2
  double dt_ctrl = 0.05;                      ///< virtual integration step per cycle, s
  int max_iters = 2000;                      ///< offline solve only
  double tol_pos = 1e-4;                     ///< m
  double tol_rot = 1e-3;                     ///< rad
  double regularization = 1e-8;              ///< lambda added to the H diagonal

  void validate() const;
};

struct CartesianError {
  Vec3 translational = Vec3::Zero();  ///< m
  Vec3 rotational = Vec3::Zero();     ///< rad, axis-angle, |.| <= pi

  Vec6 stacked() const {
    Vec6 e;
    e << translational, rotational;
    return e;
  }
};

/// target - current; rotational part is the shortest axis-angle of R_target R_current^T.
CartesianError pose_error(const Pose& target, const Pose& current);

/// f = Kp e + Kd e_dot, tagged TASK (base-frame axes, applied at the TCP).
Wrench control_wrench(const CartesianError& e, const CartesianError& e_dot, const VfdmParams& params);

/// qdd = (H + lambda I)^-1 J^T f via Cholesky. `chain` is used as given (condition it first).
VecX forward_dynamics_accel(const SerialChain& chain, const VecX& q, const Wrench& f, double regularization);

/// J (H + lambda I)^-1 J^T
Mat6 operational_space_inertia_inv(const SerialChain& chain, const VecX& q, double regularization);

struct VfdmStep {
  VecX q_next;
  CartesianError error;  ///< error at the input configuration
};

/**
 * @brief One controller cycle from rest: error, wrench, acceleration, semi-implicit Euler.
 *
 * `chain` is the real kinematic chain; the virtual masses come from `params`.
 * `previous_error` is only consulted when a D gain is non-zero, in which case e_dot is the
 * backward difference over dt_ctrl; otherwise e_dot = 0.
 */
VfdmStep vfdm_cycle(const SerialChain& chain, const VecX& q, const Pose& target, const VfdmParams& params,
                    const std::optional<CartesianError>& previous_error = std::nullopt);

/// Same as above with a pre-conditioned virtual chain (hot path in the scenario loop).
VfdmStep vfdm_cycle_conditioned(const SerialChain& virtual_chain, const VecX& q, const Pose& target,
                                const VfdmParams& params,
                                const std::optional<CartesianError>& previous_error = std::nullopt);

SerialChain make_virtual_chain(const SerialChain& chain, const VfdmParams& params);

struct IkResult {
  VecX q;
  int iterations = 0;
  bool converged = false;
  CartesianError error;  ///< error at the returned q
};

/// Repeats vfdm_cycle until both tolerances hold or max_iters cycles have run.
IkResult solve_to_convergence(const SerialChain& chain, const VecX& q0, const Pose& target,
                              const VfdmParams& params);

}  // namespace orbemu
