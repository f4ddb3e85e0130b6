#include "orbemu/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace orbemu {

namespace {

void require_dims(const SerialChain& chain, const VecX& q, const char* where) {
  if (static_cast<std::size_t>(q.size()) != chain.dof()) {
    std::ostringstream os;
    os << where << ": got " << q.size() << " joint values for a " << chain.dof() << "-joint chain";
    throw ContractViolation(os.str());
  }
}

Mat3 skew_outer(const Vec3& c) { return c.squaredNorm() * Mat3::Identity() - c * c.transpose(); }

}  // namespace

void SerialChain::validate() const {
  if (links.empty()) throw ContractViolation("chain has no links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    std::ostringstream where;
    where << "link " << i << ": ";
    if (std::abs(l.joint_axis.norm() - 1.0) > 1e-12) {
      throw ContractViolation(where.str() + "joint_axis is not unit length");
    }
    if (!(l.mass >= 0.0)) throw ContractViolation(where.str() + "mass must be >= 0");
    if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ContractViolation(where.str() + "inertia is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw ContractViolation(where.str() + "inertia is not positive semidefinite");
    }
    if (std::abs(l.parent_transform.orientation.norm() - 1.0) > 1e-9) {
      throw ContractViolation(where.str() + "parent_transform orientation is not a unit quaternion");
    }
  }
  if (std::abs(tcp_offset.orientation.norm() - 1.0) > 1e-9) {
    throw ContractViolation("tcp_offset orientation is not a unit quaternion");
  }
}

ChainFrames compute_frames(const SerialChain& chain, const VecX& q) {
  require_dims(chain, q, "compute_frames");
  ChainFrames out;
  out.link.reserve(chain.dof());
  out.axis.reserve(chain.dof());
  Pose t;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& l = chain.links[i];
    t = t * l.parent_transform;
    out.axis.push_back(t.orientation * l.joint_axis);
    t = t * Pose{Vec3::Zero(), Quat(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], l.joint_axis))};
    out.link.push_back(t);
  }
  out.tcp = t * chain.tcp_offset;
  return out;
}

Pose forward_kinematics(const SerialChain& chain, const VecX& q) { return compute_frames(chain, q).tcp; }

MatX geometric_jacobian(const SerialChain& chain, const VecX& q) {
  const ChainFrames f = compute_frames(chain, q);
  const auto n = static_cast<Eigen::Index>(chain.dof());
  MatX jac(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& z = f.axis[static_cast<std::size_t>(i)];
    const Vec3& p = f.link[static_cast<std::size_t>(i)].position;
    jac.block<3, 1>(0, i) = z.cross(f.tcp.position - p);
    jac.block<3, 1>(3, i) = z;
  }
  return jac;
}

MatX joint_space_inertia(const SerialChain& chain, const VecX& q) {
  const ChainFrames f = compute_frames(chain, q);
  const std::size_t n = chain.dof();
  MatX h = MatX::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  // composite spatial inertia of links i..n-1 about the base origin
  double mass = 0.0;
  Vec3 first_moment = Vec3::Zero();
  Mat3 inertia_origin = Mat3::Zero();

  for (std::size_t ii = n; ii-- > 0;) {
    const auto& l = chain.links[ii];
    const Mat3 r = f.link[ii].rotation();
    const Vec3 c = f.link[ii].transform_point(l.com);
    mass += l.mass;
    first_moment += l.mass * c;
    inertia_origin += r * l.inertia * r.transpose() + l.mass * skew_outer(c);

    const Vec3& z = f.axis[ii];
    const Vec3& p = f.link[ii].position;
    const Vec3 v_origin = p.cross(z);
    const Vec3 linear = mass * v_origin + z.cross(first_moment);
    const Vec3 angular_origin = first_moment.cross(v_origin) + inertia_origin * z;

    const auto i = static_cast<Eigen::Index>(ii);
    for (std::size_t jj = 0; jj <= ii; ++jj) {
      const auto j = static_cast<Eigen::Index>(jj);
      const Vec3 angular_j = angular_origin - f.link[jj].position.cross(linear);
      h(j, i) = f.axis[jj].dot(angular_j);
      h(i, j) = h(j, i);
    }
  }
  return h;
}

SerialChain slice_chain(const SerialChain& chain, std::size_t begin, std::size_t end) {
  if (begin >= end || end > chain.dof()) throw ContractViolation("slice_chain: invalid link range");
  SerialChain out;
  out.links.assign(chain.links.begin() + static_cast<std::ptrdiff_t>(begin),
                   chain.links.begin() + static_cast<std::ptrdiff_t>(end));
  out.tcp_offset = end == chain.dof() ? chain.tcp_offset : Pose::identity();
  return out;
}

SerialChain condition_virtual_chain(const SerialChain& chain, double tip_mass, const Mat3& tip_inertia,
                                    double link_mass, const Mat3& link_inertia) {
  SerialChain out = chain;
  for (auto& l : out.links) {
    l.mass = link_mass;
    l.com = Vec3::Zero();
    l.inertia = link_inertia;
  }
  auto& tip = out.links.back();
  tip.mass = tip_mass;
  tip.com = chain.tcp_offset.position;
  tip.inertia = tip_inertia;
  return out;
}

SerialChain with_uniform_link_mass(const SerialChain& chain, double mass) {
  SerialChain out = chain;
  for (auto& l : out.links) l.mass = mass;
  return out;
}

SerialChain bundled_ur10e_chain() {
  constexpr double pi = std::numbers::pi;
  // standard DH (d, a, alpha) per joint
  struct Dh {
    double d, a, alpha;
  };
  const Dh dh[6] = {{0.1807, 0.0, pi / 2}, {0.0, -0.6127, 0.0},    {0.0, -0.57155, 0.0},
                    {0.17415, 0.0, pi / 2}, {0.11985, 0.0, -pi / 2}, {0.11655, 0.0, 0.0}};
  const double masses[6] = {7.369, 13.051, 3.989, 2.1, 1.98, 0.615};
  // com in the DH frame of each link
  const Vec3 com_dh[6] = {{0.021, 0.0, 0.027},  {0.38, 0.0, 0.158},   {0.24, 0.0, 0.068},
                          {0.0, 0.007, 0.018}, {0.0, 0.007, 0.018}, {0.0, 0.0, -0.026}};
  const Vec3 inertia_diag[6] = {{0.0315, 0.0315, 0.0219}, {0.4218, 0.4218, 0.0364}, {0.1112, 0.1112, 0.0109},
                                {0.0051, 0.0051, 0.0055}, {0.0051, 0.0051, 0.0055}, {0.0005, 0.0005, 0.0006}};

  auto dh_fixed = [](const Dh& p) {
    return Pose::from_translation(Vec3(0, 0, p.d)) * Pose::from_translation(Vec3(p.a, 0, 0)) *
           Pose{Vec3::Zero(), Quat(Eigen::AngleAxisd(p.alpha, Vec3::UnitX()))};
  };

  SerialChain chain;
  Pose parent = Pose::identity();
  for (int i = 0; i < 6; ++i) {
    ChainLink l;
    l.parent_transform = parent;
    l.joint_axis = Vec3::UnitZ();
    l.mass = masses[i];
    const Pose fixed = dh_fixed(dh[i]);
    l.com = fixed.transform_point(com_dh[i]);
    l.inertia = fixed.rotation() * inertia_diag[i].asDiagonal() * fixed.rotation().transpose();
    l.inertia = 0.5 * (l.inertia + l.inertia.transpose());
    chain.links.push_back(l);
    parent = fixed;
  }
  const Pose mockup_mount{Vec3(0.0, 0.0, 0.1), Quat(Eigen::AngleAxisd(-pi / 2, Vec3::UnitY()))};
  chain.tcp_offset = parent * mockup_mount;
  return chain;
}

}  // namespace orbemu
