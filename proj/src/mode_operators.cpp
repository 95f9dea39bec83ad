#include "vortexlab/mode_operators.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace vortexlab {

namespace {

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

double angular_factor(int n) { return n == 0 ? 2.0 * kPi : kPi; }

Parity flip(Parity p) { return p == Parity::Cos ? Parity::Sin : Parity::Cos; }

// (rho^2/4)/(e^{rho^2/4} - 1)
double potential_V(double rho) {
  if (rho < 1e-6) return 1.0;
  const double x = 0.25 * rho * rho;
  return x / std::expm1(x);
}

// 2 pi rho^2 / (n (1 - e^{-rho^2/4}))
double source_c(double rho, int n) {
  if (rho < 1e-6) return 8.0 * kPi / n;
  const double x = 0.25 * rho * rho;
  return 8.0 * kPi * x / (n * -std::expm1(-x));
}

// pi rho^2 / (1 - e^{-rho^2/4}), the ratio V / G
double v_over_g(double rho) {
  if (rho < 1e-6) return 4.0 * kPi;
  const double x = 0.25 * rho * rho;
  return 4.0 * kPi * x / -std::expm1(-x);
}

// Upsilon'(rho)/rho
double upsilon_prime_over_rho(double rho) {
  if (rho < 1e-6) return 1.0 / (8.0 * kPi);
  const double x = 0.25 * rho * rho;
  return -std::expm1(-x) / (2.0 * kPi * rho * rho);
}

double inv_gaussian(double rho) { return 4.0 * kPi * std::exp(0.25 * rho * rho); }

// ---- banded BVP factorizations, cached per (grid, kind, n, parameter) ----

using SpMat = Eigen::SparseMatrix<double>;
using Solver = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

enum class BvpKind { Lambda, Resolvent };

struct BvpEntry {
  std::once_flag once;
  std::unique_ptr<Solver> solver;
  int size = 0;
};

struct BvpKey {
  int size;
  double rho_max, grading;
  BvpKind kind;
  int n;
  double param;
  friend bool operator<(const BvpKey& a, const BvpKey& b) {
    return std::tie(a.size, a.rho_max, a.grading, a.kind, a.n, a.param) <
           std::tie(b.size, b.rho_max, b.grading, b.kind, b.n, b.param);
  }
};

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}
std::map<BvpKey, std::shared_ptr<BvpEntry>>& cache() {
  static std::map<BvpKey, std::shared_ptr<BvpEntry>> c;
  return c;
}

// Discretization of
//   Lambda kind:     -phi'' - phi'/rho + (n^2/rho^2 - V) phi            (bordered at n = 1)
//   Resolvent kind:  -u'' - u'/rho + n^2 u/rho^2 + (rho/2) u' + kappa u
// with the grid's five-point stencils; nodes across the origin fold back with parity (-1)^n,
// which selects the regular solution. Last row: Robin phi' + n phi/rho = 0 (Lambda) or the
// equation itself with one-sided stencils (Resolvent).
SpMat assemble(const RadialGrid& g, BvpKind kind, int n, double kappa) {
  const int N = g.size();
  const Vec& x = g.nodes();
  const bool bordered = kind == BvpKind::Lambda && n == 1;
  const int dim = bordered ? N + 1 : N;
  const int par = parity_sign(n);
  const auto& idx = g.stencil_index();
  const auto& w1 = g.stencil_d1();
  const auto& w2 = g.stencil_d2();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(7 * dim);
  auto put = [&](int row, int k, double v) {
    if (k >= 0)
      trip.emplace_back(row, k, v);
    else
      trip.emplace_back(row, -k - 1, par * v);
  };
  const int last = N - 1;
  const int rows = kind == BvpKind::Lambda ? N - 1 : N;
  for (int i = 0; i < rows; ++i) {
    const double r = x(i);
    double diag = n * n / (r * r);
    double adv = -1.0 / r;
    if (kind == BvpKind::Lambda) {
      diag -= potential_V(r);
    } else {
      diag += kappa;
      adv += 0.5 * r;
    }
    for (int q = 0; q < 5; ++q) put(i, idx(i, q), -w2(i, q) + adv * w1(i, q));
    trip.emplace_back(i, i, diag);
    if (bordered) trip.emplace_back(i, N, upsilon_prime(r));
  }
  if (kind == BvpKind::Lambda) {
    for (int q = 0; q < 5; ++q) put(last, idx(last, q), w1(last, q));
    trip.emplace_back(last, last, n / x(last));
  }
  if (bordered) {
    // zero first moment of w = -V phi - c b: sum lw rho^2 (-V phi) = sum lw rho^2 c b
    const Vec& lw = g.line_weights();
    for (int i = 0; i < N; ++i) trip.emplace_back(N, i, -lw(i) * x(i) * x(i) * potential_V(x(i)));
  }
  SpMat A(dim, dim);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

std::shared_ptr<BvpEntry> factorization(const RadialGrid& g, BvpKind kind, int n, double kappa) {
  std::shared_ptr<BvpEntry> entry;
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto& slot = cache()[BvpKey{g.size(), g.rho_max(), g.grading(), kind, n, kappa}];
    if (!slot) slot = std::make_shared<BvpEntry>();
    entry = slot;
  }
  std::call_once(entry->once, [&] {
    SpMat A = assemble(g, kind, n, kappa);
    auto solver = std::make_unique<Solver>();
    solver->analyzePattern(A);
    solver->factorize(A);
    if (solver->info() != Eigen::Success)
      throw std::runtime_error("BVP factorization failed (mode " + std::to_string(n) + "); refine the radial grid");
    entry->size = static_cast<int>(A.rows());
    entry->solver = std::move(solver);
  });
  if (!entry->solver) throw std::runtime_error("BVP factorization unavailable");
  return entry;
}

// radial factor of Lambda[w cos] / sin, which equals that of Lambda[-w sin] / cos
Vec lambda_forward(const GridPtr& g, int n, const Vec& w) {
  const Vec psi = poisson_inverse_mode(g, n, w).a.values;
  Vec out(g->size());
  for (int i = 0; i < g->size(); ++i) {
    const double r = g->node(i);
    out(i) = n * (-upsilon_prime_over_rho(r) * w(i) - 0.5 * gaussian_G(r) * psi(i));
  }
  return out;
}

// radial factor P of Lambda*[rho cos] = P sin (and Lambda*[-rho sin] = P cos)
Vec lambda_star_forward(const GridPtr& g, int n, const Vec& rho) {
  Vec grho(g->size());
  for (int i = 0; i < g->size(); ++i) grho(i) = gaussian_G(g->node(i)) * rho(i);
  const Vec psi = poisson_inverse_mode(g, n, grho).a.values;
  Vec out(g->size());
  for (int i = 0; i < g->size(); ++i)
    out(i) = n * upsilon_prime_over_rho(g->node(i)) * rho(i) + 0.5 * n * psi(i);
  return out;
}

// phi from the Lambda BVP with right-hand side `src` (already multiplied by c)
Vec solve_phi(const RadialGrid& g, int n, const Vec& src) {
  auto entry = factorization(g, BvpKind::Lambda, n, 0.0);
  const int N = g.size();
  Vec rhs = Vec::Zero(entry->size);
  rhs.head(N - 1) = src.head(N - 1);
  if (n == 1) {
    const Vec& lw = g.line_weights();
    const Vec& x = g.nodes();
    double m = 0.0;
    for (int i = 0; i < N; ++i) m += lw(i) * x(i) * x(i) * src(i);
    rhs(N) = m;
  }
  Vec sol = entry->solver->solve(rhs);
  return sol.head(N);
}

double first_moment_1d(const RadialGrid& g, const Vec& b) {
  const Vec& lw = g.line_weights();
  const Vec& x = g.nodes();
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i) m += lw(i) * x(i) * x(i) * b(i);
  return m;
}

double abs_moment_1d(const RadialGrid& g, const Vec& b) {
  const Vec& lw = g.line_weights();
  const Vec& x = g.nodes();
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i) m += lw(i) * x(i) * x(i) * std::abs(b(i));
  return m;
}

// subtracts the multiple of rho e^{-rho^2/4} that cancels int b rho^2 drho
Vec project_moment(const RadialGrid& g, const Vec& b, double* removed) {
  const Vec k = sample(std::shared_ptr<const RadialGrid>(&g, [](const RadialGrid*) {}),
                       [](double r) { return r * std::exp(-0.25 * r * r); });
  const double mb = first_moment_1d(g, b);
  if (removed) *removed = mb;
  return b - (mb / first_moment_1d(g, k)) * k;
}

// w with lambda_forward(w) = b (second-order BVP)
Vec lambda_raw(const GridPtr& g, int n, const Vec& b) {
  const int N = g->size();
  Vec src(N), w(N);
  for (int i = 0; i < N; ++i) src(i) = source_c(g->node(i), n) * b(i);
  const Vec phi = solve_phi(*g, n, src);
  for (int i = 0; i < N; ++i) w(i) = -potential_V(g->node(i)) * phi(i) - src(i);
  return w;
}

// rho with lambda_star_forward(rho) = h (second-order BVP)
Vec lambda_star_raw(const GridPtr& g, int n, const Vec& h) {
  const int N = g->size();
  Vec src(N), out(N);
  for (int i = 0; i < N; ++i) src(i) = -(2.0 / n) * potential_V(g->node(i)) * h(i);
  const Vec phi = solve_phi(*g, n, src);
  for (int i = 0; i < N; ++i) out(i) = v_over_g(g->node(i)) * (2.0 * h(i) / n - phi(i));
  return out;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// ---- trig products ----

// adds coef * T_a(m theta) * T_b(n theta) into out
void add_trig_product(ModeField& out, const Vec& coef, Parity a, int m, Parity b, int n) {
  auto add_cos = [&](int k, double s) { out.add(std::abs(k), Parity::Cos, coef, s); };
  auto add_sin = [&](int k, double s) {
    if (k == 0) return;
    out.add(std::abs(k), Parity::Sin, coef, k > 0 ? s : -s);
  };
  if (a == Parity::Cos && b == Parity::Cos) {
    add_cos(m - n, 0.5);
    add_cos(m + n, 0.5);
  } else if (a == Parity::Sin && b == Parity::Sin) {
    add_cos(m - n, 0.5);
    add_cos(m + n, -0.5);
  } else if (a == Parity::Sin && b == Parity::Cos) {
    add_sin(m + n, 0.5);
    add_sin(m - n, 0.5);
  } else {
    add_sin(m + n, 0.5);
    add_sin(m - n, -0.5);
  }
}

}  // namespace

std::size_t bvp_cache_size() {
  std::lock_guard<std::mutex> lock(cache_mutex());
  return cache().size();
}

MassMoment mass_and_moment(const ModeField& f) {
  return mass_and_moment(f, std::numeric_limits<double>::infinity());
}

MassMoment mass_and_moment(const ModeField& f, double radius_limit) {
  const GridPtr& g = f.grid();
  Vec w = g->weights();
  for (int i = 0; i < g->size(); ++i)
    if (g->node(i) > radius_limit) w(i) = 0.0;
  MassMoment mm;
  if (const auto* p = f.find(0, Parity::Cos)) mm.mass = 2.0 * kPi * w.dot(p->values);
  if (const auto* p = f.find(1, Parity::Cos)) mm.moment(0) = kPi * w.dot(p->values.cwiseProduct(g->nodes()));
  if (const auto* p = f.find(1, Parity::Sin)) mm.moment(1) = kPi * w.dot(p->values.cwiseProduct(g->nodes()));
  return mm;
}

double inner_Y(const ModeField& f, const ModeField& g) {
  const GridPtr& grid = f.grid();
  const int N = grid->size();
  static thread_local std::pair<std::weak_ptr<const RadialGrid>, Vec> ginv;
  if (ginv.first.lock() != grid) {
    ginv.first = grid;
    ginv.second = sample(grid, inv_gaussian);
  }
  const Vec& wy = grid->weights();
  double total = 0.0, scale = 0.0, edge = 0.0;
  const int edge_start = N - std::max(4, N / 20);
  for (const auto& [k, pf] : f.entries()) {
    const auto* pg = g.find(k.n, k.parity);
    if (!pg) continue;
    const double af = angular_factor(k.n);
    for (int i = 0; i < N; ++i) {
      const double v = af * wy(i) * pf.values(i) * pg->values(i) * ginv.second(i);
      total += v;
      scale += std::abs(v);
      if (i >= edge_start) edge += std::abs(v);
    }
  }
  if (!std::isfinite(total) || edge > 1e-6 * scale + 1e-300)
    throw std::overflow_error("inner_Y: integrand does not decay faster than G on the radial grid");
  return total;
}

double norm_Y(const ModeField& f) { return std::sqrt(std::max(0.0, inner_Y(f, f))); }

double norm_Y(const VectorModeField& f) {
  return std::sqrt(std::max(0.0, inner_Y(f.c1, f.c1) + inner_Y(f.c2, f.c2)));
}

double inner_L2(const ModeField& f, const ModeField& g) {
  const Vec& w = f.grid()->weights();
  double total = 0.0;
  for (const auto& [k, pf] : f.entries()) {
    const auto* pg = g.find(k.n, k.parity);
    if (!pg) continue;
    total += angular_factor(k.n) * w.dot(pf.values.cwiseProduct(pg->values));
  }
  return total;
}

double inner_V(const VectorModeField& f, const VectorModeField& g) {
  return inner_L2(f.c1, g.c1) + inner_L2(f.c2, g.c2);
}

double norm_L2(const ModeField& f) { return std::sqrt(std::max(0.0, inner_L2(f, f))); }

namespace {

enum class SecondOrderOp { Laplacian, L, Lstar };

ModeField apply_second_order(const ModeField& f, SecondOrderOp op) {
  const GridPtr& g = f.grid();
  const Vec& x = g->nodes();
  ModeField out(g);
  for (const auto& [k, p] : f.entries()) {
    const Vec d1 = f.radial_derivative(k.n, k.parity);
    const Vec d2 = f.radial_second_derivative(k.n, k.parity);
    Vec v(g->size());
    for (int i = 0; i < g->size(); ++i) {
      const double r = x(i);
      double lap = d2(i) + d1(i) / r - k.n * k.n * p.values(i) / (r * r);
      if (op == SecondOrderOp::L) lap += 0.5 * r * d1(i) + p.values(i);
      if (op == SecondOrderOp::Lstar) lap -= 0.5 * r * d1(i);
      v(i) = lap;
    }
    out.set(k.n, k.parity, std::move(v), Vec(), p.decay);
  }
  return out;
}

}  // namespace

ModeField laplacian(const ModeField& f) { return apply_second_order(f, SecondOrderOp::Laplacian); }
ModeField apply_L(const ModeField& f) { return apply_second_order(f, SecondOrderOp::L); }
ModeField apply_Lstar(const ModeField& f) { return apply_second_order(f, SecondOrderOp::Lstar); }

PoissonInverse poisson_inverse_mode(const GridPtr& g, int n, const Vec& b) {
  const int N = g->size();
  const Vec& x = g->nodes();
  PoissonInverse out;
  out.a.values.resize(N);
  out.a.deriv.resize(N);
  out.a.decay = DecayClass::Polynomial;
  if (n == 0) {
    const Vec tb = x.cwiseProduct(b);
    const Vec head = g->cumulative(tb);
    const Vec tl = g->tail(tb);
    const double total = head(N - 1);
    double scale = 0.0;
    for (int i = 0; i < N; ++i) scale += g->line_weights()(i) * std::abs(tb(i));
    const bool massless = std::abs(total) <= 1e-12 * scale;
    Vec m(N);
    for (int i = 0; i < N; ++i) m(i) = massless ? -tl(i) : head(i);
    const Vec ap = m.cwiseQuotient(x);
    out.a.deriv = ap;
    if (massless) {
      out.a.values = -g->tail(ap);
      out.a.decay = DecayClass::Schwartz;
    } else {
      out.a.values = g->cumulative(ap);
      out.log_branch = true;
      out.log_coefficient = total;
    }
    return out;
  }
  Vec fh(N), ft(N);
  for (int i = 0; i < N; ++i) {
    fh(i) = std::pow(x(i), n + 1) * b(i);
    ft(i) = std::pow(x(i), 1 - n) * b(i);
  }
  const Vec H = g->cumulative(fh);
  const Vec T = g->tail(ft);
  for (int i = 0; i < N; ++i) {
    const double r = x(i);
    const double rn = std::pow(r, n);
    out.a.values(i) = -(H(i) / rn + rn * T(i)) / (2.0 * n);
    out.a.deriv(i) = 0.5 * (H(i) / (rn * r) - rn / r * T(i));
  }
  return out;
}

ModeField poisson_inverse(const ModeField& f) {
  ModeField out(f.grid());
  for (const auto& [k, p] : f.entries()) {
    PoissonInverse pi = poisson_inverse_mode(f.grid(), k.n, p.values);
    out.set(k.n, k.parity, std::move(pi.a.values), std::move(pi.a.deriv), pi.a.decay);
  }
  return out;
}

ModeField apply_Lambda(const ModeField& f) {
  const GridPtr& g = f.grid();
  ModeField out(g);
  for (const auto& [k, p] : f.entries()) {
    if (k.n == 0) continue;
    const Vec q = lambda_forward(g, k.n, p.values);
    // Lambda[w cos] = q sin, Lambda[w sin] = -q cos
    if (k.parity == Parity::Cos)
      out.add(k.n, Parity::Sin, q);
    else
      out.add(k.n, Parity::Cos, q, -1.0);
  }
  return out;
}

Vec invert_Lambda(const GridPtr& g, int n, const Vec& b_in, Parity input_parity, const LambdaSolveOptions& opt,
                  LambdaSolveReport* report) {
  if (n < 1) throw std::invalid_argument("invert_Lambda: mode must be >= 1 (radial functions lie in the kernel)");
  Vec b = b_in;
  double projected = 0.0;
  if (n == 1) {
    const double mb = first_moment_1d(*g, b);
    const double nb = abs_moment_1d(*g, b);
    if (std::abs(mb) > opt.moment_tol * nb)
      throw std::domain_error("invert_Lambda: mode-1 input violates the Y'_1 first-moment condition (relative defect " +
                              std::to_string(std::abs(mb) / nb) + ")");
    b = project_moment(*g, b, &projected);
  }
  Vec w = lambda_raw(g, n, b);
  for (int s = 0; s < opt.refine_steps; ++s) {
    Vec r = lambda_forward(g, n, w) - b;
    if (max_abs(r) <= 1e-15 * max_abs(b)) break;
    if (n == 1) r = project_moment(*g, r, nullptr);
    w -= lambda_raw(g, n, r);
  }
  if (report) {
    report->projected_moment = projected;
    report->final_residual = max_abs(lambda_forward(g, n, w) - b) / std::max(max_abs(b), 1e-300);
  }
  return input_parity == Parity::Sin ? w : Vec(-w);
}

ModeField invert_Lambda(const ModeField& b, const LambdaSolveOptions& opt) {
  ModeField out(b.grid());
  for (const auto& [k, p] : b.entries()) {
    if (k.n == 0) {
      if (max_abs(p.values) > 0.0)
        throw std::domain_error("invert_Lambda: radial input is outside the range of Lambda");
      continue;
    }
    out.add(k.n, flip(k.parity), invert_Lambda(b.grid(), k.n, p.values, k.parity, opt));
  }
  return out;
}

ModeField apply_Lambda_star(const ModeField& rho) {
  const GridPtr& g = rho.grid();
  ModeField out(g);
  for (const auto& [k, p] : rho.entries()) {
    if (k.n == 0) continue;
    const Vec q = lambda_star_forward(g, k.n, p.values);
    if (k.parity == Parity::Cos)
      out.add(k.n, Parity::Sin, q, 1.0, nullptr, p.decay);
    else
      out.add(k.n, Parity::Cos, q, -1.0, nullptr, p.decay);
  }
  return out;
}

ModeField invert_Lambda_star(const ModeField& h, const LambdaSolveOptions& opt) {
  const GridPtr& g = h.grid();
  ModeField out(g);
  for (const auto& [k, p] : h.entries()) {
    if (k.n == 0) {
      if (max_abs(p.values) > 0.0)
        throw std::domain_error("invert_Lambda_star: radial input is outside the range of Lambda*");
      continue;
    }
    const int n = k.n;
    Vec hv = p.values;
    auto gauss_weighted = [&](const Vec& v) {
      Vec out_v(v.size());
      for (int i = 0; i < g->size(); ++i) out_v(i) = gaussian_G(g->node(i)) * v(i);
      return out_v;
    };
    if (n == 1) {
      const Vec gh = gauss_weighted(hv);
      const double mb = first_moment_1d(*g, gh);
      if (std::abs(mb) > opt.moment_tol * abs_moment_1d(*g, gh))
        throw std::domain_error("invert_Lambda_star: mode-1 input violates the first-moment condition");
      // remove the moment along h -> h - c rho (G rho has nonzero moment)
      const Vec lin = g->nodes();
      hv -= (mb / first_moment_1d(*g, gauss_weighted(lin))) * lin;
    }
    Vec r = lambda_star_raw(g, n, hv);
    for (int s = 0; s < opt.refine_steps; ++s) {
      Vec res = lambda_star_forward(g, n, r) - hv;
      if (n == 1) {
        const Vec lin = g->nodes();
        res -= (first_moment_1d(*g, gauss_weighted(res)) / first_moment_1d(*g, gauss_weighted(lin))) * lin;
      }
      r -= lambda_star_raw(g, n, res);
    }
    out.add(n, flip(k.parity), r, k.parity == Parity::Sin ? 1.0 : -1.0, nullptr, DecayClass::Polynomial);
  }
  return out;
}

ModeField resolvent_L(double kappa, const ModeField& r, int refine_steps) {
  if (!(kappa > 0.0)) throw std::invalid_argument("resolvent_L: kappa must be positive");
  const GridPtr& g = r.grid();
  const int N = g->size();
  const Vec ginv = sample(g, inv_gaussian);
  const Vec gv = sample(g, gaussian_G);
  ModeField out(g);
  for (const auto& [k, p] : r.entries()) {
    auto entry = factorization(*g, BvpKind::Resolvent, k.n, kappa);
    auto raw = [&](const Vec& rhs_field) {
      Vec rhs = rhs_field.cwiseProduct(ginv);
      Vec u = entry->solver->solve(rhs);
      return Vec(u.cwiseProduct(gv));
    };
    Vec f = raw(p.values);
    for (int s = 0; s < refine_steps; ++s) {
      ModeField trial(g);
      trial.set(k.n, k.parity, f);
      ModeField lf = apply_L(trial);
      Vec res = kappa * f - lf.profile(k.n, k.parity) - p.values;
      if (max_abs(res) <= 1e-15 * max_abs(p.values)) break;
      f -= raw(res);
    }
    (void)N;
    out.set(k.n, k.parity, std::move(f));
  }
  return out;
}

ModeField poisson_bracket(const ModeField& f, const ModeField& g) {
  const GridPtr& grid = f.grid() ? f.grid() : g.grid();
  ModeField out(grid);
  if (f.empty() || g.empty()) return out;
  const Vec inv_r = grid->nodes().cwiseInverse();
  std::map<ModeKey, Vec> df, dg;
  for (const auto& [k, p] : f.entries()) df[k] = f.radial_derivative(k.n, k.parity);
  for (const auto& [k, p] : g.entries()) dg[k] = g.radial_derivative(k.n, k.parity);
  for (const auto& [kf, pf] : f.entries()) {
    const int m = kf.n;
    const double sf = kf.parity == Parity::Cos ? -1.0 : 1.0;
    for (const auto& [kg, pg] : g.entries()) {
      const int n = kg.n;
      const double sg = kg.parity == Parity::Cos ? -1.0 : 1.0;
      // d_rho f * d_theta g
      if (n != 0) {
        Vec c = (sg * n) * df[kf].cwiseProduct(pg.values).cwiseProduct(inv_r);
        add_trig_product(out, c, kf.parity, m, flip(kg.parity), n);
      }
      // - d_theta f * d_rho g
      if (m != 0) {
        Vec c = (-sf * m) * pf.values.cwiseProduct(dg[kg]).cwiseProduct(inv_r);
        add_trig_product(out, c, flip(kf.parity), m, kg.parity, n);
      }
    }
  }
  return out;
}

VectorModeField poisson_bracket(const VectorModeField& f, const VectorModeField& g) {
  return VectorModeField(poisson_bracket(f.c1, g.c1), poisson_bracket(f.c2, g.c2));
}

ModeField angular_derivative(const ModeField& f) {
  ModeField out(f.grid());
  for (const auto& [k, p] : f.entries()) {
    if (k.n == 0) continue;
    const Vec* d = p.has_deriv() ? &p.deriv : nullptr;
    if (k.parity == Parity::Cos)
      out.add(k.n, Parity::Sin, p.values, -k.n, d, p.decay);
    else
      out.add(k.n, Parity::Cos, p.values, k.n, d, p.decay);
  }
  return out;
}

ModeField derivative(const ModeField& f, int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("derivative: j must be 1 or 2");
  const GridPtr& g = f.grid();
  const Vec inv_r = g->nodes().cwiseInverse();
  ModeField out(g);
  for (const auto& [k, p] : f.entries()) {
    const int n = k.n;
    const Vec dr = f.radial_derivative(n, k.parity);
    const double sf = k.parity == Parity::Cos ? -1.0 : 1.0;
    const Vec th = (sf * n) * p.values.cwiseProduct(inv_r);  // d_theta f / rho, parity flipped
    if (j == 1) {
      // cos(theta) d_rho f - sin(theta) d_theta f / rho
      add_trig_product(out, dr, Parity::Cos, 1, k.parity, n);
      if (n != 0) add_trig_product(out, -th, Parity::Sin, 1, flip(k.parity), n);
    } else {
      // sin(theta) d_rho f + cos(theta) d_theta f / rho
      add_trig_product(out, dr, Parity::Sin, 1, k.parity, n);
      if (n != 0) add_trig_product(out, th, Parity::Cos, 1, flip(k.parity), n);
    }
  }
  return out;
}

ModeField project_radial(const ModeField& f) {
  ModeField out(f.grid());
  if (const auto* p = f.find(0, Parity::Cos)) out.add(0, Parity::Cos, *p);
  return out;
}

ModeField remove_mass_and_moment(const ModeField& f, MassMoment* removed) {
  const MassMoment mm = mass_and_moment(f);
  if (removed) *removed = mm;
  ModeField out = f;
  out.axpy(-mm.mass, field_G(f.grid()));
  out.axpy(mm.moment(0), field_dG(f.grid(), 1));
  out.axpy(mm.moment(1), field_dG(f.grid(), 2));
  return out;
}

}  // namespace vortexlab
