#include "orbemu/vfdm.hpp"

#include <cmath>
#include <sstream>

namespace orbemu {

namespace {

bool is_psd(const Mat3& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-15;
}

void require_unit(const Quat& q, const char* which) {
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw ContractViolation(std::string("pose_error: ") + which + " orientation is not a unit quaternion");
  }
}

std::string describe_q(const VecX& q) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q[i];
  os << "]";
  return os.str();
}

Eigen::LLT<MatX> factor_inertia(const SerialChain& chain, const VecX& q, double regularization) {
  MatX h = joint_space_inertia(chain, q);
  h.diagonal().array() += regularization;
  Eigen::LLT<MatX> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("virtual inertia H + lambda*I is not positive definite at q = " + describe_q(q) +
                         " (lambda = " + std::to_string(regularization) + ")");
  }
  return llt;
}

}  // namespace

void VfdmParams::validate() const {
  std::ostringstream errs;
  if (!(kp_trans >= 0)) errs << "vfdm.kp_trans must be >= 0; ";
  if (!(kd_trans >= 0)) errs << "vfdm.kd_trans must be >= 0; ";
  if (!(kp_rot >= 0)) errs << "vfdm.kp_rot must be >= 0; ";
  if (!(kd_rot >= 0)) errs << "vfdm.kd_rot must be >= 0; ";
  if (!(m_e > 0)) errs << "vfdm.m_e must be > 0; ";
  if (!(m_l >= 0)) errs << "vfdm.m_l must be >= 0; ";
  if (!is_psd(I_e)) errs << "vfdm.I_e must be symmetric PSD; ";
  if (!is_psd(I_l)) errs << "vfdm.I_l must be symmetric PSD; ";
  if (!(dt_ctrl > 0)) errs << "vfdm.dt_ctrl must be > 0; ";
  if (max_iters < 0) errs << "vfdm.max_iters must be >= 0; ";
  if (!(tol_pos > 0) || !(tol_rot > 0)) errs << "vfdm tolerances must be > 0; ";
  if (!(regularization >= 0)) errs << "vfdm.regularization must be >= 0; ";
  const std::string s = errs.str();
  if (!s.empty()) throw ContractViolation(s.substr(0, s.size() - 2));
}

CartesianError pose_error(const Pose& target, const Pose& current) {
  require_unit(target.orientation, "target");
  require_unit(current.orientation, "current");
  CartesianError e;
  e.translational = target.position - current.position;
  e.rotational = rotation_vector(target.orientation * current.orientation.conjugate());
  return e;
}

Wrench control_wrench(const CartesianError& e, const CartesianError& e_dot, const VfdmParams& params) {
  Wrench w;
  w.frame = Frame::Task;
  w.force = params.kp_trans * e.translational + params.kd_trans * e_dot.translational;
  w.torque = params.kp_rot * e.rotational + params.kd_rot * e_dot.rotational;
  return w;
}

VecX forward_dynamics_accel(const SerialChain& chain, const VecX& q, const Wrench& f, double regularization) {
  if (f.frame != Frame::Task && f.frame != Frame::Lab) {
    throw ContractViolation("forward_dynamics_accel: wrench must be in the base (TASK/LAB) frame, got " +
                            to_string(f.frame));
  }
  const MatX jac = geometric_jacobian(chain, q);
  const VecX tau = jac.transpose() * f.stacked();
  if (tau.isZero(0.0)) return VecX::Zero(q.size());
  return factor_inertia(chain, q, regularization).solve(tau);
}

Mat6 operational_space_inertia_inv(const SerialChain& chain, const VecX& q, double regularization) {
  const MatX jac = geometric_jacobian(chain, q);
  const MatX x = factor_inertia(chain, q, regularization).solve(jac.transpose());
  Mat6 m = jac * x;
  return 0.5 * (m + m.transpose());
}

SerialChain make_virtual_chain(const SerialChain& chain, const VfdmParams& params) {
  return condition_virtual_chain(chain, params.m_e, params.I_e, params.m_l, params.I_l);
}

VfdmStep vfdm_cycle_conditioned(const SerialChain& virtual_chain, const VecX& q, const Pose& target,
                                const VfdmParams& params, const std::optional<CartesianError>& previous_error) {
  VfdmStep out;
  out.error = pose_error(target, forward_kinematics(virtual_chain, q));

  CartesianError e_dot;
  const bool derivative_active = params.kd_trans > 0.0 || params.kd_rot > 0.0;
  if (derivative_active && previous_error) {
    e_dot.translational = (out.error.translational - previous_error->translational) / params.dt_ctrl;
    e_dot.rotational = (out.error.rotational - previous_error->rotational) / params.dt_ctrl;
  }

  const Wrench f = control_wrench(out.error, e_dot, params);
  const VecX qdd = forward_dynamics_accel(virtual_chain, q, f, params.regularization);
  // from rest: qdot = qdd*dt, then q += qdot*dt
  const VecX qdot = qdd * params.dt_ctrl;
  out.q_next = q + qdot * params.dt_ctrl;
  return out;
}

VfdmStep vfdm_cycle(const SerialChain& chain, const VecX& q, const Pose& target, const VfdmParams& params,
                    const std::optional<CartesianError>& previous_error) {
  return vfdm_cycle_conditioned(make_virtual_chain(chain, params), q, target, params, previous_error);
}

IkResult solve_to_convergence(const SerialChain& chain, const VecX& q0, const Pose& target,
                              const VfdmParams& params) {
  const SerialChain virtual_chain = make_virtual_chain(chain, params);
  IkResult r;
  r.q = q0;
  std::optional<CartesianError> prev;
  for (;;) {
    r.error = pose_error(target, forward_kinematics(virtual_chain, r.q));
    if (r.error.translational.norm() < params.tol_pos && r.error.rotational.norm() < params.tol_rot) {
      r.converged = true;
      return r;
    }
    if (r.iterations >= params.max_iters) return r;
    VfdmStep step = vfdm_cycle_conditioned(virtual_chain, r.q, target, params, prev);
    prev = step.error;
    r.q = std::move(step.q_next);
    ++r.iterations;
  }
}

}  // namespace orbemu
