#include "vortexlab/mode_operators.hpp"

#include "random_fields.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace vortexlab;
using vortexlab::testing::max_abs_on;
using vortexlab::testing::random_field;
using vortexlab::testing::random_polynomial;

namespace {

const GridPtr& grid() {
  static const GridPtr g = RadialGrid::make();
  return g;
}

ModeField dG(int j) { return field_dG(grid(), j); }

double rel_max(const ModeField& a, const ModeField& b, double lo = 0.0, double hi = 1e300) {
  return max_abs_on(a - b, lo, hi) / std::max(max_abs_on(b, lo, hi), 1e-300);
}

// adaptive Simpson
double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fb, double fc, double whole, int d) {
        const double c = 0.5 * (a + b), l = 0.5 * (a + c), r = 0.5 * (c + b);
        const double fl = f(l), fr = f(r);
        const double left = (c - a) / 6.0 * (fa + 4.0 * fl + fc), right = (b - c) / 6.0 * (fc + 4.0 * fr + fb);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
        return rec(a, c, fa, fc, fl, left, d - 1) + rec(c, b, fc, fb, fr, right, d - 1);
      };
  return rec(a, b, fa, fb, fc, (b - a) / 6.0 * (fa + 4.0 * fc + fb), depth);
}

}  // namespace

TEST_CASE("mass and moments") {
  const MassMoment a = mass_and_moment(field_G(grid(), 2.5));
  CHECK(a.mass == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(a.moment.norm() <= 1e-14);
  const MassMoment b = mass_and_moment(dG(1));
  CHECK(std::abs(b.mass) <= 1e-14);
  CHECK(b.moment(0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(b.moment(1)) <= 1e-14);
  const MassMoment c = mass_and_moment(field_radial(grid(), 2, Parity::Cos, [](double r) { return r * r * std::exp(-r * r / 4); }));
  CHECK(c.mass == 0.0);
  CHECK(c.moment.norm() == 0.0);
}

TEST_CASE("Y inner products") {
  // <G, G>_Y = int G = 1
  CHECK(inner_Y(field_G(grid()), field_G(grid())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inner_Y(dG(1), dG(2)) == 0.0);
  // mpmath: pi int (rho G / 2)^2 / G rho drho = 1/2
  CHECK(inner_Y(dG(1), dG(1)) == doctest::Approx(0.5).epsilon(1e-10));
  ModeField poly = random_polynomial(*new std::mt19937(3), grid(), 2);
  CHECK_THROWS_AS(inner_Y(poly, poly), std::overflow_error);
}

TEST_CASE("eigenfunctions of L and L*") {
  const ModeField G = field_G(grid());
  CHECK(max_abs_on(apply_L(G), 0.0, 20.0) <= 1e-8 * G.max_abs());
  for (int j = 1; j <= 2; ++j) CHECK(max_abs_on(apply_L(dG(j)) + 0.5 * dG(j), 0.0, 20.0) <= 1e-8 * dG(j).max_abs());
  const ModeField xi1 = field_Q(grid(), 1, Parity::Cos);
  // interior nodes only
  CHECK(max_abs_on(apply_Lstar(xi1) + 0.5 * xi1, 0.0, 0.9 * grid()->rho_max()) <= 1e-8 * grid()->rho_max());
}

TEST_CASE("Poisson inverse") {
  const GridPtr& g = grid();
  const PoissonInverse p0 = poisson_inverse_mode(g, 0, sample(g, gaussian_G));
  CHECK(p0.log_branch);
  CHECK(p0.log_coefficient == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
  double worst = 0.0;
  for (int i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(p0.a.deriv(i) - upsilon_prime(g->node(i))));
  CHECK(worst <= 1e-9);
  const PoissonInverse p1 = poisson_inverse_mode(g, 1, sample(g, gaussian_G_prime));
  CHECK_FALSE(p1.log_branch);
  worst = 0.0;
  for (int i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(p1.a.values(i) - upsilon_prime(g->node(i))));
  CHECK(worst <= 1e-9);
  // round trip through the forward Laplacian; the innermost nodes are left out because the
  // n^2/rho^2 term there amplifies 1e-10 errors of the inverse to 1e-3
  auto l2_outside = [&](const ModeField& f, double rho_min) {
    double acc = 0.0;
    for (const auto& [k, p] : f.entries())
      for (int i = 0; i < g->size(); ++i)
        if (g->node(i) >= rho_min) acc += g->weights()(i) * p.values(i) * p.values(i);
    return std::sqrt(acc);
  };
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    ModeField f = random_field(rng, g, 4, 3, false);
    const ModeField back = laplacian(poisson_inverse(f));
    CHECK(l2_outside(back - f, 0.05) <= 1e-8 * l2_outside(f, 0.05));
  }
}

TEST_CASE("Lambda kernel") {
  for (int j = 1; j <= 2; ++j) CHECK(norm_Y(apply_Lambda(dG(j))) <= 1e-8 * norm_Y(dG(j)));
  ModeField radial = field_radial(grid(), 0, Parity::Cos, [](double r) { return (1.0 + r * r) * std::exp(-r * r / 4); });
  CHECK(apply_Lambda(radial).max_abs() == 0.0);
}

TEST_CASE("Lambda against a direct planar bracket") {
  // f = rho^2 e^{-rho^2/4} cos 2t; Delta^{-1} f = rho^2 h(rho) cos 2t with h'' + 5 h'/rho = e^{-rho^2/4}
  auto hp = [](double r) {
    const double x = r * r / 4.0;
    if (r < 1e-3) return r / 6.0;  // series of the closed form
    return 32.0 * (2.0 - std::exp(-x) * (x * x + 2.0 * x + 2.0)) / std::pow(r, 5);
  };
  auto h = [&](double r) { return -simpson(hp, r, 60.0, 1e-14) - 32.0 * 2.0 / (4.0 * std::pow(60.0, 4)); };
  auto phi = [&](double x, double y) {
    const double r = std::hypot(x, y), c2 = (x * x - y * y) / (r * r);
    return r * r * h(r) * c2;
  };
  auto ups = [](double x, double y) { return upsilon(std::hypot(x, y)); };
  auto fld = [](double x, double y) { return (x * x - y * y) * std::exp(-(x * x + y * y) / 4.0); };
  auto G = [](double x, double y) { return gaussian_G(std::hypot(x, y)); };
  const double e = 1e-4;
  auto bracket = [&](auto A, auto B, double x, double y) {
    const double ax = (A(x + e, y) - A(x - e, y)) / (2 * e), ay = (A(x, y + e) - A(x, y - e)) / (2 * e);
    const double bx = (B(x + e, y) - B(x - e, y)) / (2 * e), by = (B(x, y + e) - B(x, y - e)) / (2 * e);
    return ax * by - ay * bx;
  };
  const ModeField f = field_radial(grid(), 2, Parity::Cos, [](double r) { return r * r * std::exp(-r * r / 4); });
  const ModeField lf = apply_Lambda(f);
  double worst = 0.0, scale = 0.0;
  for (double r : {0.7, 1.5, 2.4, 3.3, 5.0})
    for (double t : {0.3, 1.1, 2.0}) {
      const double x = r * std::cos(t), y = r * std::sin(t);
      const double oracle = bracket(ups, fld, x, y) + bracket(phi, G, x, y);
      worst = std::max(worst, std::abs(lf.eval(r, t) - oracle));
      scale = std::max(scale, std::abs(oracle));
    }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("Lambda inversion") {
  const GridPtr& g = grid();
  const ModeField b = field_radial(g, 2, Parity::Cos, [](double r) { return r * r * std::exp(-r * r / 4); });
  const ModeField w = invert_Lambda(b);
  CHECK(w.has(2, Parity::Sin));
  CHECK_FALSE(w.has(2, Parity::Cos));
  CHECK(norm_Y(apply_Lambda(w) - b) <= 1e-6 * norm_Y(b));
  // sin input maps to cos output, and the order-2 profile is positive
  const ModeField bs = field_radial(g, 2, Parity::Sin, [](double r) { return -r * r * std::exp(-r * r / 4) / (16 * kPi * kPi); });
  const ModeField ws = invert_Lambda(bs);
  CHECK(ws.has(2, Parity::Cos));
  CHECK_FALSE(ws.has(2, Parity::Sin));
  const Vec e = ws.profile(2, Parity::Cos);
  CHECK(e.minCoeff() > 0.0);
  // n = 1 with a violated moment condition is rejected
  CHECK_THROWS(invert_Lambda(field_dG(g, 1)));
}

TEST_CASE("Lambda* identities") {
  const GridPtr& g = grid();
  for (int j = 1; j <= 2; ++j) {
    const ModeField xi = field_Q(g, 1, j == 1 ? Parity::Cos : Parity::Sin);
    CHECK(max_abs_on(apply_Lambda_star(xi), 0.0, 20.0) <= 1e-8);
  }
  std::mt19937 rng(11);
  const ModeField G = field_G(g);
  for (int trial = 0; trial < 5; ++trial) {
    // polynomial times Gaussian with the Gaussian factor written out
    ModeField rho = random_field(rng, g, 3, 3, false);
    const ModeField a = apply_Lambda_star(rho);
    const ModeField grho = rho.map_profiles([&](int, Parity, const Vec& v) { return Vec(v.cwiseProduct(sample(g, gaussian_G))); });
    const ModeField b = apply_Lambda(grho).map_profiles(
        [&](int, Parity, const Vec& v) { return Vec(-v.cwiseQuotient(sample(g, gaussian_G))); });
    CHECK(rel_max(a, b, 0.0, 10.0) <= 1e-10);
  }
  const ModeField h = field_radial(g, 2, Parity::Sin, [](double r) { return r * r; }, DecayClass::Polynomial);
  const ModeField r = invert_Lambda_star(h);
  CHECK(rel_max(apply_Lambda_star(r), h, 0.0, 10.0) <= 1e-6);
}

TEST_CASE("Poisson bracket") {
  const GridPtr& g = grid();
  std::mt19937 rng(23);
  const ModeField f = random_field(rng, g, 3);
  CHECK(poisson_bracket(f, f).max_abs() <= 1e-10 * std::pow(f.max_abs(), 2));
  const ModeField G = field_G(g);
  const ModeField xi1 = field_Q(g, 1, Parity::Cos), xi2 = field_Q(g, 1, Parity::Sin);
  CHECK(rel_max(poisson_bracket(xi1, G), dG(2)) <= 1e-10);
  CHECK(rel_max(poisson_bracket(xi2, G), -dG(1)) <= 1e-10);
  // output modes are sums of input modes
  const ModeField a = random_field(rng, g, 2), b = random_field(rng, g, 3);
  CHECK(poisson_bracket(a, b).max_mode() <= a.max_mode() + b.max_mode());
}

TEST_CASE("Jacobi identity on random low-mode fields") {
  const GridPtr& g = grid();
  std::mt19937 rng(29);
  for (int trial = 0; trial < 3; ++trial) {
    const ModeField f = random_field(rng, g, 2), h = random_field(rng, g, 2), k = random_field(rng, g, 2);
    const ModeField t1 = poisson_bracket(f, poisson_bracket(h, k));
    const ModeField t2 = poisson_bracket(h, poisson_bracket(k, f));
    const ModeField t3 = poisson_bracket(k, poisson_bracket(f, h));
    const double scale = std::max({t1.max_abs(), t2.max_abs(), t3.max_abs()});
    CHECK(max_abs_on(t1 + t2 + t3, 0.0, 12.0) <= 1e-8 * scale);
  }
}

TEST_CASE("derivatives by mode shift") {
  const GridPtr& g = grid();
  const ModeField d = derivative(field_Q(g, 1, Parity::Cos), 1);
  CHECK(rel_max(d, field_Q(g, 0, Parity::Cos)) <= 1e-12);
  CHECK(rel_max(derivative(field_G(g), 1), dG(1)) <= 1e-10);
  CHECK(rel_max(dG(1), field_radial(g, 1, Parity::Cos, [](double r) { return -0.5 * r * gaussian_G(r); })) <= 1e-14);
  const ModeField q3 = field_Q(g, 3, Parity::Cos);
  CHECK(rel_max(derivative(q3, 1), 3.0 * field_Q(g, 2, Parity::Cos), 0.0, 20.0) <= 1e-9);
}

TEST_CASE("property: Lambda is skew-adjoint and L self-adjoint in Y") {
  const GridPtr& g = grid();
  std::mt19937 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const ModeField f = random_field(rng, g, 4), h = random_field(rng, g, 4);
    const double scale = norm_Y(f) * norm_Y(h);
    CHECK(std::abs(inner_Y(apply_Lambda(f), h) + inner_Y(f, apply_Lambda(h))) <= 1e-8 * scale);
    CHECK(std::abs(inner_Y(apply_L(f), h) - inner_Y(f, apply_L(h))) <= 1e-8 * scale);
  }
}

TEST_CASE("property: distinct modes are Y-orthogonal exactly") {
  const GridPtr& g = grid();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    ModeField a(g), b(g);
    const int n = trial % 4 + 1;
    a.set(n, Parity::Cos, random_field(rng, g, 0).profile(0, Parity::Cos));
    b.set(n + 1, Parity::Cos, random_field(rng, g, 0).profile(0, Parity::Cos));
    CHECK(inner_Y(a, b) == 0.0);
    b = ModeField(g);
    b.set(n, Parity::Sin, random_field(rng, g, 0).profile(0, Parity::Cos));
    CHECK(inner_Y(a, b) == 0.0);
  }
}

TEST_CASE("property: invert_Lambda undoes apply_Lambda off the kernel") {
  const GridPtr& g = grid();
  std::mt19937 rng(211);
  for (int trial = 0; trial < 6; ++trial) {
    ModeField f = remove_mass_and_moment(random_field(rng, g, 4, 3, false));
    f = (f - project_radial(f)).pruned();
    // strip the kernel directions d_j G from mode 1
    for (int j = 1; j <= 2; ++j) {
      const ModeField k = dG(j);
      f.axpy(-inner_Y(f, k) / inner_Y(k, k), k);
    }
    const ModeField back = invert_Lambda(apply_Lambda(f));
    ModeField diff = back - f;
    for (int j = 1; j <= 2; ++j) diff.axpy(-inner_Y(diff, dG(j)) / inner_Y(dG(j), dG(j)), dG(j));
    CHECK(norm_Y(diff) <= 1e-6 * norm_Y(f));
  }
}

TEST_CASE("Lambda round trip improves under refinement") {
  const GridPtr g1 = RadialGrid::make(1024), g2 = RadialGrid::make(2048);
  auto trip = [](const GridPtr& g) {
    const ModeField b = field_radial(g, 3, Parity::Sin, [](double r) { return r * r * r * std::exp(-r * r / 4); });
    return norm_Y(apply_Lambda(invert_Lambda(b)) - b) / norm_Y(b);
  };
  const double e1 = trip(g1), e2 = trip(g2);
  CHECK(e2 <= 1e-6);
  CHECK(e1 / e2 >= 2.0);
}
