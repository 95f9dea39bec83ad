#include "vortexlab/pseudo_momenta.hpp"

#include "random_fields.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vortexlab;
using vortexlab::testing::random_field;
using vortexlab::testing::random_polynomial;

namespace {

const GridPtr& grid() {
  static const GridPtr g = RadialGrid::make();
  return g;
}

const EpsilonSeries& series(int which) {
  static const EpsilonSeries a = construct_approximation({1.0, 1.0, 1.0}, 4, grid());
  static const EpsilonSeries b = construct_approximation({1.0, 0.5, 1.0}, 4, grid());
  return which == 0 ? a : b;
}

double vmax(const VectorModeField& f) { return std::max(f[0].max_abs(), f[1].max_abs()); }
double rel_vmax(const VectorModeField& a, const VectorModeField& b) { return vmax(a - b) / std::max(vmax(b), 1e-300); }

VectorModeField random_vfield(std::mt19937& rng, int max_mode, bool zero_mass = true) {
  VectorModeField f(random_field(rng, grid(), max_mode), random_field(rng, grid(), max_mode));
  if (zero_mass)
    for (int i = 0; i < 2; ++i) f[i] = remove_mass_and_moment(f[i]);
  return f;
}

}  // namespace

TEST_CASE("coupled stream of two Gaussians") {
  const GridPtr& g = grid();
  const Circulations c{1.0, 0.5, 1.0};
  const VectorModeField w(field_G(g, c.gamma1), field_G(g, c.gamma2));
  const double eps = 0.1;
  Eigen::Vector2d logc;
  const VectorModeField b0 = coupled_stream_B(w, eps, 1.0, 0, &logc);
  const VectorModeField b1 = coupled_stream_B(w, eps, 1.0, 1);
  const VectorModeField b2 = coupled_stream_B(w, eps, 1.0, 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(logc(i) == doctest::Approx(std::log(1.0 / eps) / (2.0 * kPi) * c.gamma_other(i)).epsilon(1e-12));
    // self part is the radial stream
    const Vec d = b0[i].radial_derivative(0, Parity::Cos);
    double err = 0.0;
    for (int k = 0; k < g->size(); ++k) err = std::max(err, std::abs(d(k) - c.gamma_i(i) * upsilon_prime(g->node(k))));
    CHECK(err <= 1e-8);
    const ModeField t1 = b1[i] - b0[i], t2 = b2[i] - b1[i];
    const ModeField q1 = field_Q(g, 1, Parity::Cos, Circulations::kappa(i) * c.gamma_other(i) * eps / (2.0 * kPi));
    const ModeField q2 = field_Q(g, 2, Parity::Cos, -c.gamma_other(i) * eps * eps / (4.0 * kPi));
    CHECK((t1 - q1).max_abs() <= 1e-10 * q1.max_abs());
    CHECK((t2 - q2).max_abs() <= 1e-10 * q2.max_abs());
  }
}

TEST_CASE("frame derivative") {
  const GridPtr& g = grid();
  const Circulations c{1.0, 0.5, 1.0};
  std::mt19937 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorModeField w = random_vfield(rng, 3, false);
    const VectorModeField a = frame_derivative(w, 0.07, 1.0, c), b = frame_derivative_bracket(w, 0.07, 1.0, c);
    CHECK(rel_vmax(b, a) <= 1e-9);
  }
  const VectorModeField G2(field_G(g), field_G(g));
  const VectorModeField xg = frame_derivative(G2, 0.0, 1.0, c);
  CHECK(rel_vmax(xg, VectorModeField(field_dG(g, 2, c.gamma2), field_dG(g, 2, -c.gamma1))) <= 1e-12);
  const VectorModeField X = frame_stream_X(g, 0.1, 1.0, c);
  CHECK(vmax(poisson_bracket(X, X)) <= 1e-12 * vmax(X) * vmax(X));
}

TEST_CASE("linearized operator at eps = 0 is block diagonal") {
  const EpsilonSeries& s = series(1);
  std::mt19937 rng(3);
  const VectorModeField w = random_vfield(rng, 3);
  const VectorModeField a = lambda_E_apply(w, s, 0.0);
  for (int i = 0; i < 2; ++i) {
    const ModeField ref = s.circ.gamma_i(i) * apply_Lambda(w[i]);
    CHECK((a[i] - ref).max_abs() <= 1e-10 * ref.max_abs());
  }
}

TEST_CASE("zero modes of the linearized operator") {
  const EpsilonSeries& s = series(1);
  const int M = s.order;
  double prev_x = 0.0, prev_t = 0.0;
  for (double eps : {0.04, 0.02, 0.01}) {
    const VectorModeField om = s.omega_euler(eps);
    const double rx = norm_Y(lambda_E_apply(frame_derivative(om, eps, 1.0, s.circ), s, eps));
    const PseudoMomentaSet p = build_pseudo_momenta(s, eps);
    const double te = s.theta_dot_euler_at(eps);
    const double rt = norm_Y(lambda_E_apply(p.f_te, s, eps) + (eps * eps * te) * p.f_to);
    if (prev_x > 0.0) {
      INFO("eps " << eps << " ratios " << prev_x / rx << " " << prev_t / rt);
      // at least the eps^(M+1) rate
      CHECK(prev_x / rx >= 0.85 * std::pow(2.0, M + 1));
      CHECK(prev_t / rt >= 0.85 * std::pow(2.0, M + 1));
    }
    prev_x = rx;
    prev_t = rt;
  }
}

TEST_CASE("adjoint coefficients") {
  const EpsilonSeries& s = series(1);
  const Circulations& c = s.circ;
  const GridPtr& g = grid();
  const VectorModeField xi2Y2 = times_vector(y2_vector(c), field_Q(g, 1, Parity::Sin));
  const VectorModeField xi1Y2 = times_vector(y2_vector(c), field_Q(g, 1, Parity::Cos));
  const VectorModeField l2 = lambda_E_star_order(2, xi2Y2, s);
  CHECK(rel_vmax(l2, (c.gamma() / kPi) * xi1Y2) <= 1e-9);
  CHECK(rel_vmax(lambda_E_star2_closed_form(c.gamma2, -c.gamma1, c, g), (c.gamma() / kPi) * xi1Y2) <= 1e-12);
  std::mt19937 rng(8);
  const VectorModeField r(random_polynomial(rng, g, 2), random_polynomial(rng, g, 2));
  const VectorModeField l1 = lambda_E_star_order(1, r, s);
  for (int i = 0; i < 2; ++i)
    for (const auto& [k, p] : l1[i].entries())
      if (k.n > 0 || k.parity == Parity::Sin) CHECK(p.values.lpNorm<Eigen::Infinity>() <= 1e-10);
  for (int i = 0; i < 2; ++i) {
    const ModeField rad = project_radial(l1[i]);
    if (rad.empty()) continue;
    CHECK((rad.radial_derivative(0, Parity::Cos)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  const VectorModeField xi1_0(field_Q(g, 1, Parity::Cos), ModeField(g));
  CHECK(vmax(lambda_E_star_order(0, xi1_0, s)) <= 1e-10);
  CHECK_THROWS_AS(lambda_E_star_order(3, xi1_0, s), std::invalid_argument);
}

TEST_CASE("pseudo-momenta") {
  for (int which = 0; which < 2; ++which) {
    const EpsilonSeries& s = series(which);
    const Circulations& c = s.circ;
    const GridPtr& g = grid();
    const double eps = 0.05;
    const PseudoMomentaSet p = build_pseudo_momenta(s, eps);
    REQUIRE(p.lambda_e_series.size() == 3);
    CHECK(p.lambda_e_series[0] == 0.0);
    CHECK(p.lambda_e_series[1] == 0.0);
    CHECK(p.lambda_e_series[2] == doctest::Approx(c.gamma() / kPi).epsilon(1e-14));
    CHECK(lambda_e2_from_adjoint(s) == doctest::Approx(c.gamma() / kPi).epsilon(1e-10));
    CHECK(rel_vmax(p.rho_te, times_vector(y1_vector(), field_Q(g, 1, Parity::Cos))) == 0.0);
    CHECK(rel_vmax(p.rho_to, times_vector(y1_vector(), field_Q(g, 1, Parity::Sin))) == 0.0);
    const VectorModeField om = s.omega_euler(eps);
    const VectorModeField d2(derivative(om[0], 2), derivative(om[1], 2));
    const VectorModeField d1(derivative(om[0], 1), derivative(om[1], 1));
    CHECK(rel_vmax(p.f_te, d2) <= 1e-10);
    CHECK(rel_vmax(p.f_to, -1.0 * d1) <= 1e-10);
    // rho_e - xi1 Y2 is O(eps)
    const VectorModeField de = p.rho_e - times_vector(y2_vector(c), field_Q(g, 1, Parity::Cos));
    const VectorModeField dh =
        build_pseudo_momenta(s, 0.5 * eps).rho_e - times_vector(y2_vector(c), field_Q(g, 1, Parity::Cos));
    CHECK(vmax(de) > 0.0);
    CHECK(vmax(de) / vmax(dh) == doctest::Approx(2.0).epsilon(0.05));
    // parity tags: rho_e, f_o xi2-even (cos only); rho_o, f_e xi2-odd (sin only)
    auto parity_only = [](const VectorModeField& f, Parity keep) {
      double bad = 0.0;
      for (int i = 0; i < 2; ++i)
        for (const auto& [k, pr] : f[i].entries())
          if (k.parity != keep) bad = std::max(bad, pr.values.lpNorm<Eigen::Infinity>());
      return bad;
    };
    CHECK(parity_only(p.rho_e, Parity::Cos) == 0.0);
    CHECK(parity_only(p.f_o, Parity::Cos) == 0.0);
    CHECK(parity_only(p.rho_o, Parity::Sin) == 0.0);
    CHECK(parity_only(p.f_e, Parity::Sin) == 0.0);
    // adjoint relation of the trivial pair
    const VectorModeField a = lambda_E_star_apply(p.rho_te, s, eps) - (eps * eps * s.theta_dot_euler_at(eps)) * p.rho_to;
    CHECK(vmax(a) <= 1e-3 * std::pow(eps, 3));
  }
}

TEST_CASE("inner product matrix") {
  const EpsilonSeries& s = series(1);
  const Circulations& c = s.circ;
  const double target = c.gamma1 * c.gamma2 * c.gamma();
  double prev = 0.0;
  for (double eps : {0.04, 0.02, 0.01}) {
    const Eigen::Matrix4d m = inner_product_matrix(build_pseudo_momenta(s, eps));
    CHECK((m + m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * m.cwiseAbs().maxCoeff());
    CHECK(m(0, 1) == doctest::Approx(c.gamma()).epsilon(1e-8));
    CHECK(m(1, 0) == doctest::Approx(-c.gamma()).epsilon(1e-8));
    const double bbar = m(2, 3);
    const double C = std::abs(bbar - target) / eps;
    if (prev > 0.0) CHECK(C <= 2.0 * prev + 1e-9);
    CHECK(C <= 10.0 * std::abs(target));
    prev = std::max(C, 1e-12);
  }
}

TEST_CASE("projection") {
  const EpsilonSeries& s = series(1);
  const PseudoMomentaSet p = build_pseudo_momenta(s, 0.05);
  const Eigen::Matrix4d m = inner_product_matrix(p);
  const double abar = m(0, 3);
  // the projector's own range
  const VectorModeField own = p.f_o - (abar / s.circ.gamma()) * p.f_to;
  const Projection e = project_perturbation(own, p);
  CHECK(std::abs(e.mu_o - 1.0) <= 1e-8);
  CHECK(std::abs(e.mu_e) <= 1e-8);
  CHECK(norm_Y(e.remainder) <= 1e-8 * norm_Y(own));
  // orthogonal to the nontrivial momenta
  auto mode3 = [](double r) { return r * r * r * gaussian_G(r); };
  const VectorModeField w3(field_radial(grid(), 3, Parity::Cos, mode3), field_radial(grid(), 3, Parity::Sin, mode3));
  const Projection z = project_perturbation(w3, p);
  CHECK(std::abs(z.mu_o) <= 1e-10);
  CHECK(std::abs(z.mu_e) <= 1e-10);

  std::mt19937 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const VectorModeField w = random_vfield(rng, 3);
    const Projection r = project_perturbation(w, p);
    VectorModeField sum = r.remainder;
    for (int k = 0; k < 4; ++k) sum.axpy(r.coefficients(k), p.f(k));
    CHECK(rel_vmax(sum, w) <= 1e-10);
    const double scale = std::sqrt(inner_V(w, w));
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(inner_V(r.remainder, p.rho(k))) <= 1e-9 * scale * std::max(1.0, vmax(p.rho(k))));
  }
}

TEST_CASE("adjoint duality") {
  const EpsilonSeries& s = series(1);
  std::mt19937 rng(29);
  const double eps = 0.03;
  for (int trial = 0; trial < 4; ++trial) {
    const VectorModeField w = random_vfield(rng, 3);
    const VectorModeField r(random_polynomial(rng, grid(), 2), random_polynomial(rng, grid(), 2));
    const double lhs = inner_V(lambda_E_apply(w, s, eps), r), rhs = inner_V(w, lambda_E_star_apply(r, s, eps));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(lhs), 1.0));
  }
}

TEST_CASE("phase modulation cancels the frame term") {
  const EpsilonSeries& s = series(0);
  const double eps = 0.05, mu = 0.37;
  const PseudoMomentaSet p = build_pseudo_momenta(s, eps);
  const double td = theta_dot_modulation(p, mu);
  CHECK(td == doctest::Approx(s.circ.gamma() * p.lambda_e * mu / (eps * p.alpha)).epsilon(1e-14));
  // (eps / Gamma) alpha theta_dot_p X Omega against lambda_e mu f_e, both at order eps^2
  const VectorModeField x = frame_derivative(s.omega_euler(eps), eps, p.alpha, s.circ);
  const VectorModeField lhs = (eps / s.circ.gamma() * p.alpha * td) * x;
  const VectorModeField rhs = (p.lambda_e * mu) * x;
  CHECK(rel_vmax(lhs, rhs) <= 1e-14);
}
