#include "orbemu/ods.hpp"

#include "orbemu/frames.hpp"

#include <cmath>
#include <sstream>

namespace orbemu {

double OrbitParams::omega() const { return std::sqrt(mu / (a * a * a)); }

OrbitParams OrbitParams::from_altitude(double altitude_m) {
  OrbitParams p;
  p.a = kEarthRadius + altitude_m;
  return p;
}

void OrbitParams::validate() const {
  if (!(mu > 0)) throw ContractViolation("orbit.mu must be > 0");
  if (!(a > 0)) throw ContractViolation("orbit.a must be > 0");
}

SatelliteBody SatelliteBody::cubesat_4u(std::string name) {
  SatelliteBody b;
  b.name = std::move(name);
  b.mass = 1.0;
  const double x = 0.2, y = 0.2, z = 0.1;
  b.inertia_principal = Vec3(b.mass * (y * y + z * z) / 12.0, b.mass * (x * x + z * z) / 12.0,
                             b.mass * (x * x + y * y) / 12.0);
  b.collision_radius = 0.15;
  return b;
}

void SatelliteBody::validate() const {
  std::ostringstream errs;
  if (!(mass > 0)) errs << "satellite '" << name << "': mass must be > 0; ";
  const Vec3& i = inertia_principal;
  if (!(i.minCoeff() > 0)) errs << "satellite '" << name << "': principal inertias must be > 0; ";
  if (i[0] + i[1] < i[2] || i[1] + i[2] < i[0] || i[2] + i[0] < i[1]) {
    errs << "satellite '" << name << "': principal inertias violate the triangle inequality; ";
  }
  if (!(collision_radius > 0)) errs << "satellite '" << name << "': collision_radius must be > 0; ";
  const std::string s = errs.str();
  if (!s.empty()) throw ContractViolation(s.substr(0, s.size() - 2));
}

Vec3 cw_acceleration(const SatelliteState& s, const Wrench& wrench_R, const OrbitParams& params, double mass) {
  require_frame(wrench_R, Frame::R, "cw_acceleration");
  const double w = params.omega();
  const Vec3& r = s.rho;
  const Vec3& v = s.rho_dot;
  const Vec3& f = wrench_R.force;
  return {3.0 * w * w * r.x() + 2.0 * w * v.y() + f.x() / mass,
          -2.0 * w * v.x() + f.y() / mass,
          -w * w * r.z() + f.z() / mass};
}

Vec3 attitude_rates(const Vec3& w, const Vec3& t, const SatelliteBody& body) {
  const Vec3& i = body.inertia_principal;
  return {(i[2] - i[1]) / i[0] * w[1] * w[2] + t[0] / i[0],
          (i[0] - i[2]) / i[1] * w[0] * w[2] + t[1] / i[1],
          (i[1] - i[0]) / i[2] * w[0] * w[1] + t[2] / i[2]};
}

Vec4 quat_rate(const Quat& eps, const Vec3& w) {
  const double ex = eps.x(), ey = eps.y(), ez = eps.z(), ew = eps.w();
  Eigen::Matrix4d q;
  q << ew, -ez, ey, ex,
       ez, ew, -ex, ey,
       -ey, ex, ew, ez,
       -ex, -ey, -ez, ew;
  return 0.5 * q * Vec4(w[0], w[1], w[2], 0.0);
}

Mat3 quat_to_rotation(const Quat& eps) {
  const Quat q = eps.normalized();
  const double x = q.x(), y = q.y(), z = q.z(), w = q.w();
  Mat3 c;
  c << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
       2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
       2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return c;
}

Vec3 gravity_gradient_torque(const Quat& eps, const SatelliteBody& body, double omega) {
  const Vec3 nadir_body = quat_to_rotation(eps).transpose() * Vec3(-1.0, 0.0, 0.0);
  const Vec3 i_c = body.inertia_principal.cwiseProduct(nadir_body);
  return 3.0 * omega * omega * nadir_body.cross(i_c);
}

namespace {

using StateVec = Eigen::Matrix<double, 13, 1>;

StateVec pack(const SatelliteState& s) {
  StateVec x;
  x << s.rho, s.rho_dot, s.eps.coeffs(), s.omega_body;
  return x;
}

SatelliteState unpack(const StateVec& x) {
  SatelliteState s;
  s.rho = x.segment<3>(0);
  s.rho_dot = x.segment<3>(3);
  s.eps.coeffs() = x.segment<4>(6);
  s.omega_body = x.segment<3>(10);
  return s;
}

StateVec derivative(const StateVec& x, const Wrench& wrench_R, const SatelliteBody& body,
                    const OrbitParams& params) {
  const SatelliteState s = unpack(x);
  StateVec dx;
  dx.segment<3>(0) = s.rho_dot;
  dx.segment<3>(3) = cw_acceleration(s, wrench_R, params, body.mass);
  dx.segment<4>(6) = quat_rate(s.eps, s.omega_body);
  Vec3 torque_body = quat_to_rotation(s.eps).transpose() * wrench_R.torque;
  if (params.gravity_gradient) torque_body += gravity_gradient_torque(s.eps, body, params.omega());
  dx.segment<3>(10) = attitude_rates(s.omega_body, torque_body, body);
  return dx;
}

}  // namespace

SatelliteState propagate(const SatelliteState& state, const Wrench& wrench_R, const SatelliteBody& body,
                         const OrbitParams& params, double dt) {
  require_frame(wrench_R, Frame::R, "propagate");
  if (!(dt > 0)) throw ContractViolation("propagate: dt must be > 0");
  const StateVec x = pack(state);
  const StateVec k1 = derivative(x, wrench_R, body, params);
  const StateVec k2 = derivative(x + 0.5 * dt * k1, wrench_R, body, params);
  const StateVec k3 = derivative(x + 0.5 * dt * k2, wrench_R, body, params);
  const StateVec k4 = derivative(x + dt * k3, wrench_R, body, params);
  SatelliteState out = unpack(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  out.eps.normalize();
  return out;
}

TranslationalState cw_analytic(const TranslationalState& s0, double t, double n) {
  const double nt = n * t;
  const double c = std::cos(nt);
  const double s = std::sin(nt);
  const double x0 = s0.rho.x(), y0 = s0.rho.y(), z0 = s0.rho.z();
  const double vx0 = s0.rho_dot.x(), vy0 = s0.rho_dot.y(), vz0 = s0.rho_dot.z();

  TranslationalState out;
  if (n == 0.0) {
    out.rho = s0.rho + s0.rho_dot * t;
    out.rho_dot = s0.rho_dot;
    return out;
  }
  out.rho.x() = (4.0 - 3.0 * c) * x0 + s / n * vx0 + 2.0 * (1.0 - c) / n * vy0;
  out.rho.y() = 6.0 * (s - nt) * x0 + y0 + 2.0 * (c - 1.0) / n * vx0 + (4.0 * s - 3.0 * nt) / n * vy0;
  out.rho.z() = c * z0 + s / n * vz0;
  out.rho_dot.x() = 3.0 * n * s * x0 + c * vx0 + 2.0 * s * vy0;
  out.rho_dot.y() = 6.0 * n * (c - 1.0) * x0 - 2.0 * s * vx0 + (4.0 * c - 3.0) * vy0;
  out.rho_dot.z() = -n * s * z0 + c * vz0;
  return out;
}

std::vector<Waypoint> waypoint_stream(const std::vector<TimedState>& history, double sample_rate,
                                      const FrameMapping& mapping) {
  if (!(sample_rate > 0)) throw ContractViolation("waypoint_stream: sample_rate must be > 0");
  std::vector<Waypoint> out;
  if (history.empty()) return out;

  const double t0 = history.front().t;
  const double span = history.back().t - t0;
  const auto count = static_cast<std::size_t>(std::floor(span * sample_rate + 1e-9)) + 1;
  out.reserve(count);

  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) / sample_rate;
    while (seg + 1 < history.size() && history[seg + 1].t <= t) ++seg;

    SatelliteState s = history[seg].state;
    if (seg + 1 < history.size() && t > history[seg].t) {
      const auto& a = history[seg];
      const auto& b = history[seg + 1];
      const double u = (t - a.t) / (b.t - a.t);
      s.rho = a.state.rho + u * (b.state.rho - a.state.rho);
      s.rho_dot = a.state.rho_dot + u * (b.state.rho_dot - a.state.rho_dot);
      s.eps = a.state.eps.slerp(u, b.state.eps).normalized();
      s.omega_body = a.state.omega_body + u * (b.state.omega_body - a.state.omega_body);
    }
    out.push_back({t, sat_to_tcp(s, mapping)});
  }
  return out;
}

}  // namespace orbemu
