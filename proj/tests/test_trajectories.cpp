#include "vortexlab/trajectories.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vortexlab;

TEST_CASE("point vortex velocities") {
  const std::vector<double> g = {1.0, 1.0};
  const Points z = {Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(-0.5, 0.0)};
  const Points v = point_vortex_rhs(z, g);
  CHECK(std::abs(v[0](0)) <= 1e-15);
  CHECK(v[0](1) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(v[1](1) == doctest::Approx(-1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(point_vortex_rhs({z[0], z[0]}, g), std::domain_error);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Points p(5);
    std::vector<double> gam(5);
    for (int i = 0; i < 5; ++i) {
      p[i] = Eigen::Vector2d(u(rng), u(rng));
      gam[i] = u(rng);
    }
    const Points w = point_vortex_rhs(p, gam);
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (int i = 0; i < 5; ++i) s += gam[i] * w[i];
    double scale = 0.0;
    for (int i = 0; i < 5; ++i) scale = std::max(scale, std::abs(gam[i]) * w[i].norm());
    CHECK(s.norm() <= 1e-13 * scale);
  }

  // equilateral same-sign triangle: velocities perpendicular to the radius
  Points tri(3);
  for (int i = 0; i < 3; ++i) tri[i] = Eigen::Vector2d(std::cos(2 * kPi * i / 3), std::sin(2 * kPi * i / 3));
  const Points tv = point_vortex_rhs(tri, {0.7, 0.7, 0.7});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(tv[i].dot(tri[i])) <= 1e-12 * tv[i].norm());
}

TEST_CASE("exact two-vortex rotation") {
  const Circulations c{1.0, 0.5, 1.3};
  const double rate = c.gamma() / (2.0 * kPi * c.d * c.d), T = 4.0 * kPi * kPi * c.d * c.d / c.gamma();
  const PairState s0 = two_vortex_exact(c, 0.0);
  for (double t : {0.3, 1.7, 10.0}) {
    const PairState s = two_vortex_exact(c, t);
    CHECK(s.theta == doctest::Approx(rate * t).epsilon(1e-14));
    CHECK((s.x1 - s.x2).norm() == doctest::Approx(c.d).epsilon(1e-14));
    CHECK((c.gamma1 * s.x1 + c.gamma2 * s.x2).norm() <= 1e-14);
  }
  const PairState sT = two_vortex_exact(c, T);
  CHECK((sT.x1 - s0.x1).norm() <= 1e-12);
  CHECK((sT.x2 - s0.x2).norm() <= 1e-12);
}

TEST_CASE("integrator against the exact pair") {
  {
    const Circulations c{1.0, 1.0, 1.0};
    const Points z0 = {Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(-0.5, 0.0)};
    NBodyOptions opt;
    opt.tol = 1e-10;
    const NBodyTrajectory tr = integrate_n_body(z0, {1.0, 1.0}, 10.0 * 4.0 * kPi * kPi / 2.0, opt);
    double ez = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      const PairState ex = two_vortex_exact(c, tr.t[k]);
      ez = std::max({ez, (tr.z[k][0] - ex.x1).norm(), (tr.z[k][1] - ex.x2).norm()});
    }
    CHECK(ez <= 1e-8);
  }
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> g2(-0.9, 1.0), dd(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    double gamma2 = g2(rng);
    if (std::abs(gamma2) < 0.1) gamma2 = 0.3;
    const Circulations c{1.0, gamma2, dd(rng)};
    const std::vector<double> gam = {c.gamma1, c.gamma2};
    const Points z0 = {Eigen::Vector2d(c.ell(0), 0.0), Eigen::Vector2d(c.ell(1), 0.0)};
    const double T = 4.0 * kPi * kPi * c.d * c.d / std::abs(c.gamma());
    NBodyOptions opt;
    opt.tol = 1e-10;
    const NBodyTrajectory tr = integrate_n_body(z0, gam, 10.0 * T, opt);
    const double h0 = kirchhoff_hamiltonian(z0, gam);
    const Eigen::Vector2d p0 = linear_impulse(z0, gam);
    double ez = 0.0, eh = 0.0, ep = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      const PairState ex = two_vortex_exact(c, tr.t[k]);
      ez = std::max({ez, (tr.z[k][0] - ex.x1).norm(), (tr.z[k][1] - ex.x2).norm()});
      eh = std::max(eh, std::abs(kirchhoff_hamiltonian(tr.z[k], gam) - h0));
      ep = std::max(ep, (linear_impulse(tr.z[k], gam) - p0).norm());
    }
    INFO("gamma2 " << c.gamma2 << " d " << c.d);
    CHECK(tr.t.back() == doctest::Approx(10.0 * T).epsilon(1e-14));
    // positions relative to the radius of the outer vortex
    CHECK(ez <= 1e-8 * std::max({1.0, std::abs(c.ell(0)), std::abs(c.ell(1))}));
    CHECK(eh <= 1e-8);
    CHECK(ep <= 1e-10);
  }
}

TEST_CASE("integrator conserves the invariants of a three-vortex flow") {
  const Points z0 = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(-0.3, 0.8), Eigen::Vector2d(-0.4, -0.7)};
  const std::vector<double> gam = {1.0, 0.6, 0.8};
  NBodyOptions opt;
  opt.tol = 1e-10;
  const NBodyTrajectory tr = integrate_n_body(z0, gam, 50.0, opt);
  const double h0 = kirchhoff_hamiltonian(z0, gam), a0 = angular_impulse(z0, gam);
  double eh = 0.0, ea = 0.0;
  for (const Points& z : tr.z) {
    eh = std::max(eh, std::abs(kirchhoff_hamiltonian(z, gam) - h0));
    ea = std::max(ea, std::abs(angular_impulse(z, gam) - a0));
  }
  INFO("accepted steps " << tr.accepted);
  CHECK(eh <= 10.0 * opt.tol);
  CHECK(ea <= 10.0 * opt.tol);
  CHECK(tr.accepted > 0);
}

TEST_CASE("collision is reported") {
  // threshold above the separation trips the monitor on the first step
  const Points z0 = {Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(-0.5, 0.0)};
  NBodyOptions opt;
  opt.min_distance = 2.0;
  CHECK_THROWS_AS(integrate_n_body(z0, {1.0, 1.0}, 1.0, opt), CollisionError);
}

TEST_CASE("corrected phase") {
  const Circulations c{1.0, 1.0, 1.0};
  const double nu = 1e-4, rate = c.gamma() / (2.0 * kPi);
  // zero beta gives the point-vortex phase
  const std::vector<double> zero(7, 0.0);
  for (double t : {1.0, 5.0, 50.0}) {
    const PhasePrediction p = corrected_phase(c, zero, nu, t);
    CHECK(p.theta == doctest::Approx(two_vortex_exact(c, t).theta).epsilon(1e-14));
    CHECK(p.theta_dot == doctest::Approx(rate).epsilon(1e-14));
  }
  // the truncation at k = 4 drifts as t^3
  std::vector<double> b4(5, 0.0);
  b4[4] = 139.779247773403;
  auto drift = [&](double t) { return corrected_phase(c, b4, nu, t).theta - rate * t; };
  CHECK(drift(20.0) / drift(10.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(drift(10.0) == doctest::Approx(rate * b4[4] / 3.0 * nu * nu * 1000.0).epsilon(1e-12));
  const PhasePrediction p = corrected_phase(c, b4, nu, 10.0);
  CHECK(p.theta_dot == doctest::Approx(rate * (1.0 + b4[4] * nu * nu * 100.0)).epsilon(1e-12));
  // the validity cap
  CHECK_THROWS_AS(corrected_phase(c, b4, nu, 2000.0), std::domain_error);
  // sign flip of the circulations
  const Circulations m{-1.0, -1.0, 1.0};
  CHECK(corrected_phase(m, b4, nu, 10.0).theta == doctest::Approx(-p.theta).epsilon(1e-14));
}

TEST_CASE("predicted centers keep the momentum normalization") {
  const std::vector<double> beta = {0.0, 0.0, 0.0, 0.0, 174.7, 0.0};
  const std::vector<double> alpha = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1856.27};
  for (const Circulations& c : {Circulations{1.0, 0.5, 1.0}, Circulations{1.0, -0.3, 2.0}}) {
    for (double t : {1.0, 20.0, 80.0}) {
      const double nu = 1e-4;
      const PairState s = predicted_state(c, beta, nu, t, alpha);
      CHECK((c.gamma1 * s.x1 + c.gamma2 * s.x2).norm() <= 1e-14 * c.d);
      CHECK((s.x1 - s.x2).norm() == doctest::Approx(s.alpha * c.d).epsilon(1e-14));
      const double eps = std::sqrt(nu * t) / c.d;
      CHECK(s.alpha == doctest::Approx(1.0 - 1856.27 * std::pow(eps, 6)).epsilon(1e-14));
    }
  }
}
