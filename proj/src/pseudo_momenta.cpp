#include "vortexlab/pseudo_momenta.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab {

Eigen::Vector2d y1_vector() { return {1.0, 1.0}; }
Eigen::Vector2d y2_vector(const Circulations& c) { return {c.gamma2, -c.gamma1}; }

VectorModeField times_vector(const Eigen::Vector2d& a, const ModeField& f) {
  return VectorModeField(a(0) * f, a(1) * f);
}

namespace {

// alpha^{-n}, n = 0..kmax, as eps-series truncated at kmax
std::vector<std::vector<double>> inverse_powers(const std::vector<double>& alpha, int kmax) {
  std::vector<double> inv(kmax + 1, 0.0);
  inv[0] = 1.0 / alpha[0];
  for (int k = 1; k <= kmax; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k && j < static_cast<int>(alpha.size()); ++j) s += alpha[j] * inv[k - j];
    inv[k] = -s / alpha[0];
  }
  std::vector<std::vector<double>> pw(kmax + 1, std::vector<double>(kmax + 1, 0.0));
  pw[0][0] = 1.0;
  for (int n = 1; n <= kmax; ++n)
    for (int i = 0; i <= kmax; ++i)
      for (int j = 0; i + j <= kmax; ++j) pw[n][i + j] += pw[n - 1][i] * inv[j];
  return pw;
}

ModeField own_stream(const ModeField& f) { return f.empty() ? ModeField(f.grid()) : poisson_inverse(f); }

// eps^a coefficient of B_a applied to an eps-independent field
VectorModeField coupled_stream_order(const VectorModeField& w, int a, const std::vector<std::vector<double>>& pw) {
  const GridPtr& g = w.grid();
  VectorModeField out(g);
  if (a == 0) {
    for (int i = 0; i < 2; ++i) out[i] = own_stream(w[i]);
    return out;
  }
  for (int i = 0; i < 2; ++i) {
    const ModeField& src = w[1 - i];
    if (src.empty()) continue;
    const auto mu = complex_moments(src, a);
    for (int n = 1; n <= a; ++n) {
      const double c = std::pow(Circulations::kappa(i), n) * pw[n][a - n];
      if (c == 0.0) continue;
      out[i].axpy(c, moment_expansion_term(g, mu, n, true));
    }
  }
  return out;
}

// eps^k coefficients of the Euler stream for k = 0..kmax
std::vector<VectorModeField> euler_stream_series(const EpsilonSeries& s, int kmax) {
  const GridPtr& g = s.grid;
  const Circulations& c = s.circ;
  const auto alpha = s.alpha_coefficients();
  const auto pw = inverse_powers(alpha, kmax);
  std::vector<VectorModeField> psi(kmax + 1, VectorModeField(g));
  for (int b = 0; b <= std::min(s.order, kmax); ++b)
    for (int a = 0; a + b <= kmax; ++a) {
      if (a == 0 && b == 0) {
        for (int i = 0; i < 2; ++i) psi[0][i] += field_upsilon(g, c.gamma_i(i));
        continue;
      }
      psi[a + b] += coupled_stream_order(s.euler[b], a, pw);
    }
  const ModeField r2 = field_rho2(g);
  const ModeField x1 = field_Q(g, 1, Parity::Cos);
  const auto& te = s.theta_dot_euler;
  for (int k = 0; k < static_cast<int>(te.size()) && k + 2 <= kmax; ++k)
    for (int i = 0; i < 2; ++i) psi[k + 2][i].axpy(0.5 * te[k], r2);
  // (theta alpha)_m xi1 at order m + 1
  for (int m = 0; m + 1 <= kmax; ++m) {
    double ta = 0.0;
    for (int j = 0; j <= m; ++j)
      if (j < static_cast<int>(te.size()) && m - j < static_cast<int>(alpha.size())) ta += te[j] * alpha[m - j];
    if (ta == 0.0) continue;
    for (int i = 0; i < 2; ++i) psi[m + 1][i].axpy(Circulations::kappa(i) * c.gamma_other(i) / c.gamma() * ta, x1);
  }
  return psi;
}

double vsum_inner(const VectorModeField& a, const VectorModeField& b) { return inner_V(a, b); }

}  // namespace

VectorModeField coupled_stream_B(const VectorModeField& w, double eps, double alpha, int n_terms,
                                 Eigen::Vector2d* log_constant) {
  const GridPtr& g = w.grid();
  VectorModeField out(g);
  Eigen::Vector2d logc = Eigen::Vector2d::Zero();
  for (int i = 0; i < 2; ++i) {
    out[i] = own_stream(w[i]);
    const ModeField& src = w[1 - i];
    if (src.empty()) continue;
    const auto mu = complex_moments(src, std::max(n_terms, 0));
    logc(i) = mu[0].real() / (2.0 * kPi) * std::log(std::abs(alpha / eps));
    const double lam = Circulations::kappa(i) * eps / alpha;
    double p = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
      p *= lam;
      out[i].axpy(p, moment_expansion_term(g, mu, n, true));
    }
  }
  if (log_constant) *log_constant = logc;
  return out;
}

VectorModeField frame_stream_X(const GridPtr& g, double eps, double alpha, const Circulations& c) {
  VectorModeField x = times_vector(y2_vector(c), field_Q(g, 1, Parity::Cos));
  const ModeField r2 = field_rho2(g, eps * c.gamma() / (2.0 * alpha));
  x[0] += r2;
  x[1] += r2;
  return x;
}

VectorModeField frame_derivative(const VectorModeField& w, double eps, double alpha, const Circulations& c) {
  const Eigen::Vector2d y2 = y2_vector(c);
  const double rot = eps * c.gamma() / alpha;
  VectorModeField out(w.grid());
  for (int i = 0; i < 2; ++i) {
    if (w[i].empty()) continue;
    out[i] = y2(i) * derivative(w[i], 2);
    out[i].axpy(rot, angular_derivative(w[i]));
  }
  return out;
}

VectorModeField frame_derivative_bracket(const VectorModeField& w, double eps, double alpha, const Circulations& c) {
  return poisson_bracket(frame_stream_X(w.grid(), eps, alpha, c), w);
}

VectorModeField euler_stream(const EpsilonSeries& s, double eps) {
  const double alpha = s.alpha(eps);
  const VectorModeField om = s.omega_euler(eps);
  VectorModeField psi = coupled_stream_B(om, eps, alpha, s.order + 2);
  // the leading own stream is gamma_i Upsilon up to a constant
  for (int i = 0; i < 2; ++i) {
    psi[i] -= own_stream(s.euler[0][i]);
    psi[i] += field_upsilon(s.grid, s.circ.gamma_i(i));
  }
  psi.axpy(eps / s.circ.gamma() * s.theta_dot_euler_at(eps) * alpha, frame_stream_X(s.grid, eps, alpha, s.circ));
  return psi;
}

VectorModeField lambda_E_apply(const VectorModeField& w, const EpsilonSeries& s, double eps) {
  const double alpha = s.alpha(eps);
  const VectorModeField om = s.omega_euler(eps);
  VectorModeField out = poisson_bracket(euler_stream(s, eps), w);
  out += poisson_bracket(coupled_stream_B(w, eps, alpha, s.order + 2), om);
  return out;
}

VectorModeField lambda_E_star_apply(const VectorModeField& r, const EpsilonSeries& s, double eps) {
  const double alpha = s.alpha(eps);
  const VectorModeField om = s.omega_euler(eps);
  VectorModeField out = -1.0 * poisson_bracket(euler_stream(s, eps), r);
  out -= coupled_stream_B(poisson_bracket(r, om), eps, alpha, s.order + 2);
  return out;
}

VectorModeField lambda_E_star_order(int ell, const VectorModeField& r, const EpsilonSeries& s) {
  if (ell < 0 || ell > 2) throw std::invalid_argument("lambda_E_star_order: only orders 0, 1, 2 are supported");
  const GridPtr& g = s.grid;
  if (ell == 0) {
    VectorModeField out(g);
    for (int i = 0; i < 2; ++i) out[i] = s.circ.gamma_i(i) * apply_Lambda_star(r[i]);
    return out;
  }
  if (s.order < ell) throw std::invalid_argument("lambda_E_star_order: series order below ell");
  const auto psi = euler_stream_series(s, ell);
  const auto pw = inverse_powers(s.alpha_coefficients(), ell);
  VectorModeField out = -1.0 * poisson_bracket(psi[ell], r);
  for (int b = 0; b <= ell; ++b) {
    const VectorModeField h = poisson_bracket(r, s.euler[b]);
    out -= coupled_stream_order(h, ell - b, pw);
  }
  return out;
}

VectorModeField lambda_E_star2_closed_form(double mu1, double mu2, const Circulations& c, const GridPtr& g) {
  const ModeField x1 = field_Q(g, 1, Parity::Cos);
  const double g1 = c.gamma1, g2 = c.gamma2, gam = c.gamma();
  const double a1 = (g2 * (mu1 - mu2) + mu1 * gam) / (2.0 * kPi);
  const double a2 = (g1 * (mu2 - mu1) + mu2 * gam) / (2.0 * kPi);
  return VectorModeField(a1 * x1, a2 * x1);
}

const VectorModeField& PseudoMomentaSet::rho(int k) const {
  switch (k) {
    case 0: return rho_te;
    case 1: return rho_to;
    case 2: return rho_e;
    case 3: return rho_o;
  }
  throw std::out_of_range("PseudoMomentaSet::rho");
}

const VectorModeField& PseudoMomentaSet::f(int k) const {
  switch (k) {
    case 0: return f_te;
    case 1: return f_to;
    case 2: return f_e;
    case 3: return f_o;
  }
  throw std::out_of_range("PseudoMomentaSet::f");
}

PseudoMomentaSet build_pseudo_momenta(const EpsilonSeries& s, double eps) {
  if (s.order < 2) throw std::invalid_argument("build_pseudo_momenta: series order must be >= 2");
  const GridPtr& g = s.grid;
  const Circulations& c = s.circ;
  PseudoMomentaSet p;
  p.circ = c;
  p.eps = eps;
  p.alpha = s.alpha(eps);
  p.order = 2;
  const ModeField x1 = field_Q(g, 1, Parity::Cos);
  const ModeField x2 = field_Q(g, 1, Parity::Sin);
  p.rho_te = times_vector(y1_vector(), x1);
  p.rho_to = times_vector(y1_vector(), x2);
  // the order-1 and order-2 corrections of the odd momentum vanish, and the even one is the frame stream
  p.rho_o = times_vector(y2_vector(c), x2);
  p.rho_e = frame_stream_X(g, eps, p.alpha, c);

  const VectorModeField om = s.omega_euler(eps);
  p.f_te = poisson_bracket(p.rho_te, om);
  p.f_to = poisson_bracket(p.rho_to, om);
  p.f_e = poisson_bracket(p.rho_e, om);
  p.f_o = poisson_bracket(p.rho_o, om);
  p.lambda_e_series = {0.0, 0.0, c.gamma() / kPi};
  p.lambda_e = eps * eps * c.gamma() / kPi;
  return p;
}

double lambda_e2_from_adjoint(const EpsilonSeries& s) {
  const GridPtr& g = s.grid;
  const Circulations& c = s.circ;
  const VectorModeField r = times_vector(y2_vector(c), field_Q(g, 1, Parity::Sin));
  const VectorModeField out = lambda_E_star_order(2, r, s);
  const ModeField wx1 = field_radial(g, 1, Parity::Cos, [](double rho) { return rho * gaussian_G(rho); });
  const VectorModeField target = times_vector(y2_vector(c), wx1);
  const VectorModeField basis = times_vector(y2_vector(c), field_Q(g, 1, Parity::Cos));
  return inner_V(out, target) / inner_V(basis, target);
}

Eigen::Matrix4d inner_product_matrix(const PseudoMomentaSet& p) {
  Eigen::Matrix4d m;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) m(j, k) = vsum_inner(p.f(k), p.rho(j));
  return m;
}

Projection project_perturbation(const VectorModeField& w, const PseudoMomentaSet& p) {
  const Circulations& c = p.circ;
  Projection out;
  out.matrix = inner_product_matrix(p);
  const Eigen::Matrix4d& m = out.matrix;
  const double a = m(0, 3), b = m(2, 3), cc = m(1, 2);
  const double det = b + a * cc / c.gamma();
  if (std::abs(det) < 1e-6 * std::abs(c.gamma1 * c.gamma2 * c.gamma()))
    throw std::domain_error("project_perturbation: singular projection (b + a c / Gamma vanishes)");
  Eigen::Vector4d rhs;
  for (int j = 0; j < 4; ++j) rhs(j) = vsum_inner(w, p.rho(j));
  out.coefficients = m.fullPivLu().solve(rhs);
  out.mu_e = out.coefficients(2);
  out.mu_o = out.coefficients(3);
  out.remainder = w;
  for (int k = 0; k < 4; ++k) out.remainder.axpy(-out.coefficients(k), p.f(k));
  return out;
}

double theta_dot_modulation(const PseudoMomentaSet& p, double mu_o) {
  return p.circ.gamma() * p.lambda_e * mu_o / (p.eps * p.alpha);
}

}  // namespace vortexlab
