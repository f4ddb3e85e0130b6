#include "doctest.h"
#include "fixtures.hpp"

#include "orbemu/frames.hpp"
#include "orbemu/ods.hpp"

#include <cmath>

using namespace orbemu;

namespace {

OrbitParams orbit_with_omega(double omega) {
  OrbitParams p;
  p.a = std::cbrt(p.mu / (omega * omega));
  return p;
}

const Wrench kNoWrench = Wrench::zero(Frame::R);

}  // namespace

TEST_CASE("800 km orbit rate") {
  OrbitParams p;
  CHECK(p.omega() == doctest::Approx(1.0383e-3).epsilon(1e-3));
  CHECK(2 * M_PI / p.omega() == doctest::Approx(6052).epsilon(1e-3));
}

TEST_CASE("cw_acceleration") {
  OrbitParams p = orbit_with_omega(1e-3);
  SatelliteState s;
  CHECK(cw_acceleration(s, kNoWrench, p, 1.0).norm() == 0.0);

  s.rho = Vec3(1, 0, 0);
  CHECK((cw_acceleration(s, kNoWrench, p, 1.0) - Vec3(3e-6, 0, 0)).norm() < 1e-15);

  s = {};
  s.rho_dot = Vec3(1, 0, 0);
  CHECK((cw_acceleration(s, kNoWrench, p, 1.0) - Vec3(0, -2e-3, 0)).norm() < 1e-15);

  s = {};
  Wrench w{Vec3(0, 0, 0.5), Vec3::Zero(), Frame::R};
  CHECK((cw_acceleration(s, w, p, 1.0) - Vec3(0, 0, 0.5)).norm() < 1e-15);

  CHECK_THROWS_AS(cw_acceleration(s, Wrench::zero(Frame::Lab), p, 1.0), ContractViolation);
}

TEST_CASE("attitude_rates") {
  SatelliteBody sphere;
  sphere.inertia_principal = Vec3(2, 2, 2);
  CHECK(attitude_rates(Vec3(0.3, -1, 2), Vec3::Zero(), sphere).norm() == 0.0);

  SatelliteBody b;
  b.inertia_principal = Vec3(1, 2, 3);
  CHECK((attitude_rates(Vec3(0, 1, 1), Vec3::Zero(), b) - Vec3(1, 0, 0)).norm() < 1e-15);

  b.inertia_principal = Vec3(1.5, 2, 3);
  CHECK((attitude_rates(Vec3::Zero(), Vec3(0.3, 0, 0), b) - Vec3(0.2, 0, 0)).norm() < 1e-15);
}

TEST_CASE("quat_rate") {
  std::mt19937_64 rng(2);
  CHECK(quat_rate(fixtures::random_quat(rng), Vec3::Zero()).norm() == 0.0);
  CHECK((quat_rate(Quat::Identity(), Vec3(0, 0, 2)) - Vec4(0, 0, 1, 0)).norm() < 1e-15);
  for (int i = 0; i < 100; ++i) {
    Quat e = fixtures::random_quat(rng);
    Vec4 d = quat_rate(e, Vec3::Random() * 3);
    CHECK(std::abs(e.coeffs().dot(d)) < 1e-12);
  }
}

TEST_CASE("quat_to_rotation") {
  CHECK((quat_to_rotation(Quat::Identity()) - Mat3::Identity()).norm() < 1e-15);
  Quat z90;
  z90.coeffs() << 0, 0, std::sqrt(0.5), std::sqrt(0.5);
  CHECK((quat_to_rotation(z90) * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    Mat3 C = quat_to_rotation(fixtures::random_quat(rng));
    CHECK((C.transpose() * C - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(C.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("propagate") {
  SatelliteBody body;
  OrbitParams p;
  SatelliteState s;
  SatelliteState n = propagate(s, kNoWrench, body, p, 0.01);
  CHECK(n.rho == s.rho);
  CHECK(n.rho_dot == s.rho_dot);
  CHECK(n.eps.coeffs() == s.eps.coeffs());

  SUBCASE("out-of-plane oscillator reaches -1 at half period") {
    const double omega = p.omega();
    const double t_end = M_PI / omega;
    const double dt = 1e-3;
    const auto steps = static_cast<long>(std::floor(t_end / dt));
    SatelliteState z;
    z.rho.z() = 1.0;
    for (long i = 0; i < steps; ++i) z = propagate(z, kNoWrench, body, p, dt);
    z = propagate(z, kNoWrench, body, p, t_end - steps * dt);
    CHECK(z.rho.z() == doctest::Approx(-1.0).epsilon(1e-8));
  }

  SUBCASE("fourth-order convergence against the closed form") {
    // Short-period rate so that truncation error dominates roundoff.
    OrbitParams fast = orbit_with_omega(0.05);
    TranslationalState x0{Vec3(1, 0.5, -0.3), Vec3(0.01, -0.02, 0.03)};
    auto run = [&](double dt) {
      SatelliteState st;
      st.rho = x0.rho;
      st.rho_dot = x0.rho_dot;
      const long steps = std::lround(100.0 / dt);
      for (long i = 0; i < steps; ++i) st = propagate(st, kNoWrench, body, fast, dt);
      return (st.rho - cw_analytic(x0, 100.0, fast.omega()).rho).norm();
    };
    double ratio = run(0.5) / run(0.25);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
  }

  SUBCASE("quaternion stays unit") {
    SatelliteState a;
    a.omega_body = Vec3(0.3, -0.2, 0.5);
    body.inertia_principal = Vec3(1, 2, 3);
    for (int i = 0; i < 1000; ++i) {
      a = propagate(a, kNoWrench, body, p, 1e-2);
      REQUIRE(std::abs(a.eps.norm() - 1.0) < 1e-9);
    }
  }

  CHECK_THROWS_AS(propagate(s, kNoWrench, body, p, 0.0), ContractViolation);
}

TEST_CASE("cw_analytic") {
  const double omega = OrbitParams{}.omega();
  TranslationalState zero;
  TranslationalState r = cw_analytic(zero, 1234.0, omega);
  CHECK(r.rho.norm() == 0.0);
  CHECK(r.rho_dot.norm() == 0.0);

  TranslationalState x0{Vec3(0.4, -0.1, 0.2), Vec3(0.001, 0.002, -0.003)};
  const double c0 = x0.rho_dot.y() + 2 * omega * x0.rho.x();
  for (double t = 0; t < 7000; t += 97.0) {
    TranslationalState x = cw_analytic(x0, t, omega);
    CHECK(std::abs(x.rho_dot.y() + 2 * omega * x.rho.x() - c0) < 1e-12);
  }

  SUBCASE("agrees with RK4 over a short arc") {
    SatelliteState s;
    s.rho = x0.rho;
    s.rho_dot = x0.rho_dot;
    for (int i = 0; i < 10000; ++i) s = propagate(s, kNoWrench, SatelliteBody{}, OrbitParams{}, 1e-3);
    CHECK((s.rho - cw_analytic(x0, 10.0, omega).rho).norm() < 1e-12);
  }
}

TEST_CASE("waypoint_stream") {
  FrameMapping identity;
  identity.lab_from_R = Pose::identity();

  SUBCASE("static satellite") {
    std::vector<TimedState> h;
    SatelliteState s;
    s.rho = Vec3(0.1, 0.2, 0.3);
    for (int i = 0; i <= 100; ++i) h.push_back({i * 0.01, s});
    auto w = waypoint_stream(h, 30.0, identity);
    for (const auto& p : w) CHECK(p.pose.position == w.front().pose.position);
  }

  SUBCASE("constant drift") {
    const double T = 2.37, r = 25.0, v = 0.1;
    std::vector<TimedState> h;
    for (int i = 0; i <= 237; ++i) {
      SatelliteState s;
      s.rho = Vec3(v * i * 0.01, 0, 0);
      s.rho_dot = Vec3(v, 0, 0);
      h.push_back({i * 0.01, s});
    }
    auto w = waypoint_stream(h, r, identity);
    CHECK(w.size() == static_cast<std::size_t>(std::floor(T * r)) + 1);
    for (std::size_t k = 1; k < w.size(); ++k) {
      CHECK(w[k].t > w[k - 1].t);
      CHECK(w[k].pose.position.x() - w[k - 1].pose.position.x() == doctest::Approx(v / r).epsilon(1e-9));
    }
  }

  CHECK_THROWS_AS(waypoint_stream({}, 0.0, identity), ContractViolation);
}
