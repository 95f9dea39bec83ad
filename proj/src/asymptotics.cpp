#include "vortexlab/asymptotics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vortexlab {

void Circulations::validate() const {
  if (!std::isfinite(gamma1) || !std::isfinite(gamma2) || !std::isfinite(d))
    throw std::invalid_argument("Circulations: non-finite parameter");
  if (gamma1 == 0.0 || gamma2 == 0.0) throw std::invalid_argument("Circulations: each circulation must be nonzero");
  if (gamma() == 0.0) throw std::invalid_argument("Circulations: total circulation must be nonzero");
  if (!(d > 0.0)) throw std::invalid_argument("Circulations: separation must be positive");
}

std::vector<std::string> Circulations::validity_warnings() const {
  std::vector<std::string> w;
  const double r = gamma2 / gamma1;
  if (std::abs(r) < 0.05) w.push_back("|gamma2/gamma1| < 0.05: expansion constants degenerate as gamma2 -> 0");
  if (r < -0.95) w.push_back("gamma2/gamma1 < -0.95: expansion constants degenerate as gamma -> 0");
  return w;
}

std::vector<std::complex<double>> complex_moments(const ModeField& f, int jmax) {
  const GridPtr& g = f.grid();
  std::vector<std::complex<double>> mu(jmax + 1, 0.0);
  const Vec& w = g->weights();
  const Vec& r = g->nodes();
  for (int j = 0; j <= jmax; ++j) {
    Vec rj = r.array().pow(j);
    if (j == 0) {
      if (const auto* p = f.find(0, Parity::Cos)) mu[0] = 2.0 * kPi * w.dot(p->values);
      continue;
    }
    double re = 0.0, im = 0.0;
    if (const auto* p = f.find(j, Parity::Cos)) re = kPi * w.dot(p->values.cwiseProduct(rj));
    if (const auto* p = f.find(j, Parity::Sin)) im = kPi * w.dot(p->values.cwiseProduct(rj));
    mu[j] = {re, im};
  }
  return mu;
}

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

ModeField moment_expansion_term(const GridPtr& g, const std::vector<std::complex<double>>& mu, int n,
                                bool drop_constants) {
  if (n < 1) throw std::invalid_argument("moment_expansion_term: n must be >= 1");
  if (static_cast<int>(mu.size()) <= n) throw std::invalid_argument("moment_expansion_term: too few moments");
  const double cn = ((n % 2 == 1) ? 1.0 : -1.0) / (2.0 * kPi * n);
  ModeField out(g);
  // Re[(z - w)^n] integrated against f: sum_j C(n,j) (-1)^j Re(z^{n-j} mu_j)
  for (int j = 0; j <= n; ++j) {
    const double c = cn * binomial(n, j) * ((j % 2 == 0) ? 1.0 : -1.0);
    const int m = n - j;
    if (m == 0) {
      if (!drop_constants && mu[j].real() != 0.0) out += field_Q(g, 0, Parity::Cos, c * mu[j].real());
      continue;
    }
    if (mu[j].real() != 0.0) out += field_Q(g, m, Parity::Cos, c * mu[j].real());
    if (mu[j].imag() != 0.0) out += field_Q(g, m, Parity::Sin, -c * mu[j].imag());
  }
  return out;
}

ModeField moment_expansion_term(const ModeField& f, int n, bool drop_constants) {
  return moment_expansion_term(f.grid(), complex_moments(f, n), n, drop_constants);
}

MomentExpansion moment_expansion(const ModeField& f, int order, bool drop_constants) {
  if (order < 0 || order > 12) throw std::invalid_argument("moment_expansion: order must lie in [0, 12]");
  MomentExpansion e;
  const auto mu = complex_moments(f, std::max(order, 0));
  e.log_coefficient = mu[0].real() / (2.0 * kPi);
  for (int n = 1; n <= order; ++n) e.terms.push_back(moment_expansion_term(f.grid(), mu, n, drop_constants));
  return e;
}

// ---- second-order profiles ----

Order2Profiles build_order2(const GridPtr& g, int refine_steps) {
  Order2Profiles p;
  const Vec b = sample(g, [](double r) { return -r * r / (16.0 * kPi * kPi) * std::exp(-0.25 * r * r); });
  LambdaSolveOptions opt;
  opt.refine_steps = refine_steps;
  p.euler = invert_Lambda(g, 2, b, Parity::Sin, opt);

  ModeField e(g);
  e.set(2, Parity::Cos, p.euler);
  const ModeField rhs = apply_L(e) - e;
  const Vec r = rhs.profile(2, Parity::Cos);
  p.viscous = invert_Lambda(g, 2, r, Parity::Cos, opt);

  const Vec le = apply_Lambda(e).profile(2, Parity::Sin);
  p.euler_residual = (le - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
  ModeField v(g);
  v.set(2, Parity::Sin, p.viscous);
  const Vec lv = apply_Lambda(v).profile(2, Parity::Cos);
  p.viscous_residual = (lv - r).cwiseAbs().maxCoeff() / r.cwiseAbs().maxCoeff();
  return p;
}

VectorModeField order2_euler_field(const GridPtr& g, const Circulations& c, const Order2Profiles& p) {
  VectorModeField out(g);
  for (int i = 0; i < 2; ++i) out[i].set(2, Parity::Cos, c.gamma_other(i) * p.euler);
  return out;
}

VectorModeField order2_viscous_field(const GridPtr& g, const Circulations& c, const Order2Profiles& p) {
  VectorModeField out(g);
  for (int i = 0; i < 2; ++i) out[i].set(2, Parity::Sin, (c.gamma_other(i) / c.gamma_i(i)) * p.viscous);
  return out;
}

// ---- series helpers ----

std::vector<double> EpsilonSeries::alpha_coefficients() const {
  std::vector<double> a(order + 2, 0.0);
  a[0] = 1.0;
  for (int k = 2; k <= order + 1; ++k) {
    const int j = k - 2;
    if (j < static_cast<int>(alpha_dot_viscous.size())) a[k] = 2.0 / k * alpha_dot_viscous[j];
  }
  return a;
}

double EpsilonSeries::alpha(double eps) const {
  const auto a = alpha_coefficients();
  double s = 0.0, p = 1.0;
  for (double c : a) {
    s += c * p;
    p *= eps;
  }
  return s;
}

double EpsilonSeries::theta_dot_euler_at(double eps) const {
  double s = 0.0, p = 1.0;
  for (double c : theta_dot_euler) {
    s += c * p;
    p *= eps;
  }
  return s;
}

double EpsilonSeries::theta_dot(double eps, double nu) const {
  double s = 0.0, p = 1.0;
  for (std::size_t k = 0; k < theta_dot_euler.size(); ++k) {
    const double v = k < theta_dot_viscous.size() ? theta_dot_viscous[k] : 0.0;
    s += (theta_dot_euler[k] + nu * v) * p;
    p *= eps;
  }
  return s;
}

VectorModeField EpsilonSeries::omega_euler(double eps) const {
  VectorModeField out(grid);
  double p = 1.0;
  for (int k = 0; k <= order; ++k) {
    out.axpy(p, euler[k]);
    p *= eps;
  }
  return out;
}

VectorModeField EpsilonSeries::omega(double eps, double nu) const {
  VectorModeField out = omega_euler(eps);
  double p = 1.0;
  for (int k = 0; k <= order; ++k) {
    out.axpy(nu * p, viscous[k]);
    p *= eps;
  }
  return out;
}

namespace {

using Key = std::pair<int, int>;
using FieldSeries = std::map<Key, ModeField>;

void accumulate(FieldSeries& s, const GridPtr& g, int k, int p, const ModeField& f, double scale = 1.0) {
  if (f.empty() || scale == 0.0) return;
  auto it = s.find({k, p});
  if (it == s.end()) it = s.emplace(Key{k, p}, ModeField(g)).first;
  it->second.axpy(scale, f);
}

std::vector<double> series_product(const std::vector<double>& a, const std::vector<double>& b, int kmax) {
  std::vector<double> c(kmax + 1, 0.0);
  for (int i = 0; i < static_cast<int>(a.size()) && i <= kmax; ++i)
    for (int j = 0; j < static_cast<int>(b.size()) && i + j <= kmax; ++j) c[i + j] += a[i] * b[j];
  return c;
}

// coefficients of alpha^{-n} for n = 0..kmax, each truncated at eps^kmax
std::vector<std::vector<double>> inverse_alpha_powers(const std::vector<double>& alpha, int kmax) {
  std::vector<double> inv(kmax + 1, 0.0);
  inv[0] = 1.0 / alpha[0];
  for (int k = 1; k <= kmax; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j)
      if (j < static_cast<int>(alpha.size())) s += alpha[j] * inv[k - j];
    inv[k] = -s / alpha[0];
  }
  std::vector<std::vector<double>> pw(kmax + 1);
  pw[0] = std::vector<double>(kmax + 1, 0.0);
  pw[0][0] = 1.0;
  for (int n = 1; n <= kmax; ++n) pw[n] = series_product(pw[n - 1], inv, kmax);
  return pw;
}

double coef(const std::vector<double>& v, int k) { return k >= 0 && k < static_cast<int>(v.size()) ? v[k] : 0.0; }

// Residual coefficients of one component.
FieldSeries component_residual(const EpsilonSeries& s, int i, int kmax) {
  const GridPtr& g = s.grid;
  const Circulations& c = s.circ;
  const int io = 1 - i;
  const double ki = Circulations::kappa(i);
  const double gi = c.gamma_i(i), go = c.gamma_other(i), gam = c.gamma();
  const int kd = std::min(s.order, kmax);

  FieldSeries omega, psi, res;
  for (int k = 0; k <= kd; ++k) {
    accumulate(omega, g, k, 0, s.euler[k][i]);
    accumulate(omega, g, k, 1, s.viscous[k][i]);
  }

  // own stream function; the leading term is gamma_i Upsilon exactly
  for (int k = 0; k <= kd; ++k) {
    if (k == 0)
      accumulate(psi, g, 0, 0, field_upsilon(g, gi));
    else if (!s.euler[k][i].empty())
      accumulate(psi, g, k, 0, poisson_inverse(s.euler[k][i]));
    if (!s.viscous[k][i].empty()) accumulate(psi, g, k, 1, poisson_inverse(s.viscous[k][i]));
  }

  // stream of the partner seen from this core, shift kappa_i alpha / eps along e1
  const auto alpha = s.alpha_coefficients();
  const auto inv_pow = inverse_alpha_powers(alpha, kmax);
  for (int b = 0; b <= kd; ++b) {
    for (int p = 0; p <= 1; ++p) {
      const ModeField& src = p == 0 ? s.euler[b][io] : s.viscous[b][io];
      if (src.empty()) continue;
      const int nmax = kmax - b;
      if (nmax < 1) continue;
      const auto mu = complex_moments(src, nmax);
      for (int n = 1; n <= nmax; ++n) {
        const ModeField term = moment_expansion_term(g, mu, n, true);
        if (term.empty()) continue;
        const double kn = std::pow(ki, n);
        for (int a = 0; n + a + b <= kmax; ++a) {
          const double w = kn * inv_pow[n][a];
          if (w != 0.0) accumulate(psi, g, n + a + b, p, term, w);
        }
      }
    }
  }

  // rotating-frame terms
  const ModeField r2 = field_rho2(g);
  const ModeField x1 = field_Q(g, 1, Parity::Cos);
  const ModeField x2 = field_Q(g, 1, Parity::Sin);
  const int nth = static_cast<int>(s.theta_dot_euler.size());
  for (int k = 0; k < nth && k + 2 <= kmax; ++k) {
    accumulate(psi, g, k + 2, 0, r2, 0.5 * s.theta_dot_euler[k]);
    accumulate(psi, g, k + 2, 1, r2, 0.5 * coef(s.theta_dot_viscous, k));
  }
  const auto ta_e = series_product(s.theta_dot_euler, alpha, kmax);
  const auto ta_v = series_product(s.theta_dot_viscous, alpha, kmax);
  const double lin = ki * go / gam;
  for (int m = 0; m + 1 <= kmax; ++m) {
    accumulate(psi, g, m + 1, 0, x1, lin * ta_e[m]);
    accumulate(psi, g, m + 1, 1, x1, lin * ta_v[m]);
    accumulate(psi, g, m + 1, 1, x2, lin * coef(s.alpha_dot_viscous, m));
  }

  // (t d_t - L) Omega; t d_t eps^k = (k/2) eps^k, and L G = 0 is used for the leading term
  for (const auto& [key, f] : omega) {
    const auto [k, p] = key;
    if (k == 0 && p == 0) continue;
    accumulate(res, g, k, p, 0.5 * k * f - apply_L(f));
  }
  // (1/nu) {Psi, Omega}
  for (const auto& [ka, pf] : psi) {
    for (const auto& [kb, of] : omega) {
      const int k = ka.first + kb.first;
      if (k > kmax) continue;
      const ModeField br = poisson_bracket(pf, of);
      accumulate(res, g, k, ka.second + kb.second - 1, br);
    }
  }
  return res;
}

double defect_scale(const ModeField& f) {
  const GridPtr& g = f.grid();
  const Vec wr = g->weights().cwiseProduct((1.0 + g->nodes().array()).matrix());
  double s = 0.0;
  for (const auto& [k, p] : f.entries()) s += kPi * wr.dot(p.values.cwiseAbs());
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Removes the (already checked, small) mass and first moments.
ModeField project_out(const ModeField& f, std::vector<std::string>& log, const std::string& tag) {
  MassMoment mm;
  ModeField out = remove_mass_and_moment(f, &mm);
  const double d = std::max(std::abs(mm.mass), mm.moment.cwiseAbs().maxCoeff());
  if (d > 1e-14) log.push_back(tag + ": mass/moment defect " + fmt(d) + " projected");
  return out;
}

// Lambda^{-1} on every mode with mode-1 defects projected (and reported).
ModeField invert_Lambda_logged(const ModeField& b, const ConstructionOptions& opt, std::vector<std::string>& log,
                               const std::string& tag) {
  const GridPtr& g = b.grid();
  ModeField out(g);
  LambdaSolveOptions lo;
  lo.refine_steps = opt.lambda_refine;
  lo.moment_tol = opt.solvability_tol;
  for (const auto& [k, p] : b.entries()) {
    if (k.n == 0) continue;
    LambdaSolveReport rep;
    Vec w = invert_Lambda(g, k.n, p.values, k.parity, lo, &rep);
    if (std::abs(rep.projected_moment) > 1e-14) log.push_back(tag + ": mode-1 moment defect " + fmt(rep.projected_moment) + " projected");
    out.add(k.n, k.parity == Parity::Cos ? Parity::Sin : Parity::Cos, w);
  }
  // first moments are fixed with the kernel d_j G, which leaves Lambda[out] unchanged
  if (out.has(1, Parity::Cos) || out.has(1, Parity::Sin)) {
    const Eigen::Vector2d mom = mass_and_moment(out).moment;
    out.axpy(mom(0), field_dG(g, 1));
    out.axpy(mom(1), field_dG(g, 2));
  }
  return out;
}

}  // namespace

ResidualSeries residual_series(const EpsilonSeries& s, int kmax) {
  ResidualSeries out;
  for (int i = 0; i < 2; ++i) {
    FieldSeries r = component_residual(s, i, kmax);
    for (auto& [key, f] : r) {
      auto it = out.find(key);
      if (it == out.end()) it = out.emplace(key, VectorModeField(s.grid)).first;
      it->second[i] = std::move(f);
    }
  }
  return out;
}

EpsilonSeries construct_approximation(const Circulations& c, int order, const GridPtr& grid,
                                      const ConstructionOptions& opt) {
  c.validate();
  if (order < 1 || order > 12) throw std::invalid_argument("construct_approximation: order must lie in [1, 12]");
  EpsilonSeries s;
  s.circ = c;
  s.grid = grid ? grid : RadialGrid::make();
  const GridPtr& g = s.grid;
  s.order = 0;
  s.euler.push_back(VectorModeField(field_G(g, c.gamma1), field_G(g, c.gamma2)));
  s.viscous.push_back(VectorModeField(g));
  for (const auto& w : c.validity_warnings()) s.log.push_back("warning: " + w);

  const double g12 = c.gamma1 * c.gamma2, gam = c.gamma();
  for (int K = 1; K <= order; ++K) {
    s.order = K;
    s.euler.push_back(VectorModeField(g));
    s.viscous.push_back(VectorModeField(g));
    s.theta_dot_euler.push_back(0.0);
    s.theta_dot_viscous.push_back(0.0);
    s.alpha_dot_viscous.push_back(0.0);

    ResidualSeries rs = residual_series(s, K);
    VectorModeField H0 = rs.count({K, -1}) ? rs[{K, -1}] : VectorModeField(g);
    VectorModeField H1 = rs.count({K, 0}) ? rs[{K, 0}] : VectorModeField(g);

    // moment conditions fix the scalars of order K-1 (read off vortex 1)
    const MassMoment m0 = mass_and_moment(H0[0]);
    const MassMoment m1 = mass_and_moment(H1[0]);
    const double te = gam * m0.moment(1) / g12;
    const double tv = gam * m1.moment(1) / g12;
    const double av = -gam * m1.moment(0) / g12;
    s.theta_dot_euler[K - 1] = te;
    s.theta_dot_viscous[K - 1] = tv;
    s.alpha_dot_viscous[K - 1] = av;
    for (int i = 0; i < 2; ++i) {
      const double lin = Circulations::kappa(i) * c.gamma_other(i) / gam;
      const ModeField gi = field_G(g, c.gamma_i(i));
      H0[i] += poisson_bracket(field_Q(g, 1, Parity::Cos, lin * te), gi);
      H1[i] += poisson_bracket(field_Q(g, 1, Parity::Cos, lin * tv), gi);
      H1[i] += poisson_bracket(field_Q(g, 1, Parity::Sin, lin * av), gi);
    }

    const double kappa = 0.5 * K;
    for (int i = 0; i < 2; ++i) {
      const std::string tag = "order " + std::to_string(K) + " vortex " + std::to_string(i + 1);
      for (int lev = 0; lev < 2; ++lev) {
        const ModeField& H = lev == 0 ? H0[i] : H1[i];
        const MassMoment mm = mass_and_moment(H);
        const double sc = std::max(defect_scale(H), 1e-300);
        const double defect = std::max(std::abs(mm.mass), mm.moment.cwiseAbs().maxCoeff());
        if (defect > opt.solvability_tol * sc && defect > 1e-14)
          throw std::runtime_error("construct_approximation: " + tag + ": H" + std::to_string(lev) +
                                   " violates the mass/moment solvability condition (defect " + fmt(defect / sc) + ")");
      }
      const double gi = c.gamma_i(i);

      // radial part of the nu^0 coefficient goes through the resolvent
      ModeField p0 = project_radial(H1[i]);
      const double pm = mass_and_moment(p0).mass;
      if (pm != 0.0) {
        p0.axpy(-pm, field_G(g));
        if (std::abs(pm) > 1e-15) s.log.push_back(tag + ": radial mass defect " + fmt(pm) + " projected");
      }
      ModeField e0 = p0.empty() ? ModeField(g) : resolvent_L(kappa, -1.0 * p0, opt.resolvent_refine);
      // the resolvent keeps mass zero only up to truncation at rho_max
      if (const double em = mass_and_moment(e0).mass; !e0.empty() && em != 0.0) {
        e0.axpy(-em, field_G(g));
        if (std::abs(em) > 1e-15) s.log.push_back(tag + ": resolvent mass defect " + fmt(em) + " projected");
      }

      ModeField h0 = project_out(H0[i], s.log, tag + " euler");
      h0.erase(0, Parity::Cos);
      ModeField e1 = invert_Lambda_logged((-1.0 / gi) * h0, opt, s.log, tag + " euler");

      ModeField rhs = H1[i] - project_radial(H1[i]);
      rhs += kappa * e1 - apply_L(e1);
      rhs = project_out(rhs, s.log, tag + " viscous");
      rhs.erase(0, Parity::Cos);
      ModeField ns = invert_Lambda_logged((-1.0 / gi) * rhs, opt, s.log, tag + " viscous");

      const double floor = 1e-15 * std::max(std::abs(c.gamma1), std::abs(c.gamma2));
      s.euler[K][i] = (e0 + e1).pruned(floor);
      s.viscous[K][i] = ns.pruned(floor);
    }
  }
  return s;
}

ResidualParts residual_parts(const EpsilonSeries& s, double eps, int extra_orders) {
  const int kmax = s.order + std::max(extra_orders, 0);
  return residual_parts(residual_series(s, kmax), s.grid, eps);
}

ResidualParts residual_parts(const ResidualSeries& rs, const GridPtr& g, double eps) {
  ResidualParts out{VectorModeField(g), VectorModeField(g), VectorModeField(g)};
  for (const auto& [key, f] : rs) {
    const double w = std::pow(eps, key.first);
    if (key.second == -1)
      out.inv_nu.axpy(w, f);
    else if (key.second == 0)
      out.nu0.axpy(w, f);
    else if (key.second == 1)
      out.nu1.axpy(w, f);
  }
  return out;
}

VectorModeField residual(const EpsilonSeries& s, double eps, double nu, int extra_orders) {
  const ResidualParts p = residual_parts(s, eps, extra_orders);
  VectorModeField out = p.nu0;
  out.axpy(1.0 / nu, p.inv_nu);
  out.axpy(nu, p.nu1);
  return out;
}

BetaTable beta_coefficients(const EpsilonSeries& s) {
  BetaTable t;
  const Circulations& c = s.circ;
  const double gam = c.gamma();
  const GridPtr& g = s.grid;
  for (std::size_t k = 0; k < s.theta_dot_euler.size(); ++k) {
    const double te = s.theta_dot_euler[k];
    t.raw.push_back(-te);
    t.normalized.push_back(k == 0 ? -2.0 * kPi * te / gam - 1.0 : -2.0 * kPi * te / gam);
    t.viscous_raw.push_back(k < s.theta_dot_viscous.size() ? -s.theta_dot_viscous[k] : 0.0);
  }
  Vec e;
  if (s.order >= 2 && s.euler[2][0].has(2, Parity::Cos))
    e = s.euler[2][0].profile(2, Parity::Cos) / c.gamma2;
  else
    e = build_order2(g).euler;
  t.profile_integral = g->weights().dot(e.cwiseProduct(g->nodes().cwiseAbs2()));
  ModeField ef(g);
  ef.set(2, Parity::Cos, e);
  t.angular_form = inner_L2(field_Q(g, 2, Parity::Cos), ef) / (2.0 * kPi);
  t.integral_form = 0.5 * t.profile_integral;
  t.beta4_closed_form = kPi * (c.gamma1 * c.gamma1 + c.gamma2 * c.gamma2) / (c.gamma1 * c.gamma2) * t.profile_integral;
  if (s.order < 5)
    t.warnings.push_back("order < 5: beta_4 from the moment conditions is unavailable; closed form only");
  if (std::abs(c.gamma2 / c.gamma1) < 0.05)
    t.warnings.push_back("|gamma2| < 0.05 |gamma1|: beta_k blow up as gamma2 -> 0");
  return t;
}

}  // namespace vortexlab
