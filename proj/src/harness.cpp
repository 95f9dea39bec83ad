#include "vortexlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vortexlab {

namespace {

double wrap_offset(double dx, double box) { return dx - box * std::round(dx / box); }

double wrap_angle(double a) { return a - 2.0 * kPi * std::round(a / (2.0 * kPi)); }

// Restricts every profile to rho <= limit.
ModeField truncate(const ModeField& f, double limit) {
  if (!(limit < f.grid()->rho_max())) return f;
  const Vec& r = f.grid()->nodes();
  return f.map_profiles([&](int, Parity, const Vec& v) {
    Vec out = v;
    for (int i = 0; i < out.size(); ++i)
      if (r(i) > limit) out(i) = 0.0;
    return out;
  });
}

Vec limited_weights(const GridPtr& g, double limit) {
  Vec w = g->weights();
  for (int i = 0; i < w.size(); ++i)
    if (g->node(i) > limit) w(i) = 0.0;
  return w;
}

}  // namespace

Eigen::Vector2d extract_center(const GridField& w, const Eigen::Vector2d& guess, double gamma, double d,
                               const CenterOptions& opt) {
  const double R = opt.radius * d, h = w.h(), L = w.box;
  const double sgn = gamma >= 0.0 ? 1.0 : -1.0;
  const int span = static_cast<int>(std::ceil(R / h)) + 2;
  // centroid of the disk around c, relative to c
  auto shift = [&](const Eigen::Vector2d& c) {
    const int ic = static_cast<int>(std::floor((c(0) + 0.5 * L) / h));
    const int jc = static_cast<int>(std::floor((c(1) + 0.5 * L) / h));
    double sw = 0.0;
    Eigen::Vector2d sx = Eigen::Vector2d::Zero();
    for (int dj = -span; dj <= span; ++dj)
      for (int di = -span; di <= span; ++di) {
        const int i = ((ic + di) % w.n + w.n) % w.n;
        const int j = ((jc + dj) % w.n + w.n) % w.n;
        const double rx = wrap_offset(w.coord(i) - c(0), L);
        const double ry = wrap_offset(w.coord(j) - c(1), L);
        const double r = std::hypot(rx, ry);
        const double cover = std::clamp((R - r) / h + 0.5, 0.0, 1.0);
        if (cover == 0.0) continue;
        const double v = std::max(sgn * w.at(i, j), 0.0) * cover;
        sw += v;
        sx += v * Eigen::Vector2d(rx, ry);
      }
    if (!(sw > 0.0)) throw ExtractionError("extract_center: no vorticity of the expected sign inside the disk");
    return Eigen::Vector2d(sx / sw);
  };
  auto escaped = [&](const Eigen::Vector2d& c) { return (c - guess).norm() > R; };

  // Anderson(1) on the centroid map: a partner vortex under the disk slows the plain iteration to a
  // contraction near 0.7, too slow for 50 iterations. The fixed point is unchanged.
  Eigen::Vector2d c = guess, prev_c = guess, prev_r = Eigen::Vector2d::Zero();
  bool have_prev = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Eigen::Vector2d r = shift(c);
    if (r.norm() < opt.tol * d) return c + r;
    Eigen::Vector2d next = c + r;
    if (have_prev) {
      const Eigen::Vector2d dr = r - prev_r;
      const double dd = dr.squaredNorm();
      if (dd > 0.0) {
        const double g = dr.dot(r) / dd;
        const Eigen::Vector2d acc = c + r - g * ((c + r) - (prev_c + prev_r));
        if (!escaped(acc)) next = acc;
      }
    }
    prev_c = c;
    prev_r = r;
    have_prev = true;
    c = next;
    if (escaped(c)) {
      std::ostringstream os;
      os << "extract_center: centroid left the disk (guess " << guess.transpose() << ", now " << c.transpose() << ")";
      throw ExtractionError(os.str());
    }
  }
  std::ostringstream os;
  os << "extract_center: no convergence in " << opt.max_iter << " iterations near " << c.transpose();
  throw ExtractionError(os.str());
}

std::array<Eigen::Vector2d, 2> extract_centers(const GridField& w, const std::array<Eigen::Vector2d, 2>& guesses,
                                               const Circulations& c, const CenterOptions& opt) {
  return {extract_center(w, guesses[0], c.gamma1, c.d, opt), extract_center(w, guesses[1], c.gamma2, c.d, opt)};
}

double l1_error(const GridField& w, const Circulations& c, const std::array<Eigen::Vector2d, 2>& centers, double t,
                double nu) {
  const double s2 = nu * t, L = w.box;
  const double a1 = c.gamma1 / (4.0 * kPi * s2), a2 = c.gamma2 / (4.0 * kPi * s2);
  double acc = 0.0;
  for (int j = 0; j < w.n; ++j) {
    const double y = w.coord(j);
    const double dy1 = wrap_offset(y - centers[0](1), L), dy2 = wrap_offset(y - centers[1](1), L);
    for (int i = 0; i < w.n; ++i) {
      const double x = w.coord(i);
      const double dx1 = wrap_offset(x - centers[0](0), L), dx2 = wrap_offset(x - centers[1](0), L);
      const double ref = a1 * std::exp(-(dx1 * dx1 + dy1 * dy1) / (4.0 * s2)) +
                         a2 * std::exp(-(dx2 * dx2 + dy2 * dy2) / (4.0 * s2));
      acc += std::abs(w.at(i, j) - ref);
    }
  }
  return acc * w.h() * w.h();
}

double sample_bicubic(const GridField& w, double x, double y) {
  const double h = w.h();
  const double fx = (x + 0.5 * w.box) / h, fy = (y + 0.5 * w.box) / h;
  const long ix = static_cast<long>(std::floor(fx)), iy = static_cast<long>(std::floor(fy));
  const double tx = fx - ix, ty = fy - iy;
  // cubic Lagrange weights on nodes -1, 0, 1, 2
  auto weights = [](double t, double* c) {
    c[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    c[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    c[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    c[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  };
  double cx[4], cy[4];
  weights(tx, cx);
  weights(ty, cy);
  auto wrap = [&](long k) { return static_cast<int>(((k % w.n) + w.n) % w.n); };
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int j = wrap(iy - 1 + b);
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += cx[a] * w.at(wrap(ix - 1 + a), j);
    acc += cy[b] * row;
  }
  return acc;
}

ModeField self_similar_view(const GridField& w, const Eigen::Vector2d& center, double theta, double t, double nu,
                            const GridPtr& grid, const ViewOptions& opt) {
  const double s = std::sqrt(nu * t);
  const int K = std::max(opt.angles, 2 * opt.max_mode + 2);
  const double limit = std::min(opt.rho_limit, (0.5 * w.box - 2.0 * w.h()) / s);
  const Eigen::Vector2d e(std::cos(theta), std::sin(theta)), ep(-std::sin(theta), std::cos(theta));
  const int N = grid->size();
  std::vector<Vec> cs(opt.max_mode + 1, Vec::Zero(N)), sn(opt.max_mode + 1, Vec::Zero(N));
  std::vector<double> ca(K), sa(K);
  for (int m = 0; m < K; ++m) {
    ca[m] = std::cos(2.0 * kPi * m / K);
    sa[m] = std::sin(2.0 * kPi * m / K);
  }
  std::vector<double> vals(K);
  for (int j = 0; j < N; ++j) {
    const double rho = grid->node(j);
    if (rho > limit) break;
    for (int m = 0; m < K; ++m) {
      const Eigen::Vector2d x = center + s * rho * (ca[m] * e + sa[m] * ep);
      vals[m] = nu * t * sample_bicubic(w, x(0), x(1));
    }
    for (int n = 0; n <= opt.max_mode; ++n) {
      double ac = 0.0, as = 0.0;
      for (int m = 0; m < K; ++m) {
        const long q = (static_cast<long>(n) * m) % K;
        ac += vals[m] * ca[q];
        as += vals[m] * sa[q];
      }
      cs[n](j) = (n == 0 ? 1.0 : 2.0) * ac / K;
      sn[n](j) = 2.0 * as / K;
    }
  }
  ModeField out(grid);
  for (int n = 0; n <= opt.max_mode; ++n) {
    out.set(n, Parity::Cos, cs[n]);
    if (n > 0) out.set(n, Parity::Sin, sn[n]);
  }
  return out;
}

PhaseSeries measure_phase(const std::vector<double>& t, const std::vector<Eigen::Vector2d>& center1,
                          const Circulations& c, double rate_factor) {
  if (t.size() < 3 || t.size() != center1.size()) throw std::invalid_argument("measure_phase: need >= 3 samples");
  PhaseSeries p;
  double prev = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    double a = std::atan2(center1[k](1), center1[k](0));
    if (k > 0) a = prev + wrap_angle(a - prev);
    p.theta.push_back(a);
    prev = a;
  }
  const double rate = rate_factor * c.gamma() / (2.0 * kPi * c.d * c.d);
  for (std::size_t k = 0; k < t.size(); ++k) p.drift.push_back(p.theta[k] - rate * t[k]);
  return p;
}

double torus_rate_factor(double d, double box) { return 1.0 - kPi * d * d / (box * box); }

double energy_W0(const ModeField& w_in, double radius_limit) {
  const ModeField w = truncate(w_in, radius_limit);
  const GridPtr& g = w.grid();
  const Vec wt = limited_weights(g, radius_limit);
  const Vec W = sample(g, w0_weight);
  double quad = 0.0;
  for (const auto& [k, p] : w.entries()) {
    const double ang = k.n == 0 ? 2.0 * kPi : kPi;
    quad += ang * wt.dot(p.values.cwiseAbs2().cwiseProduct(W));
  }
  if (w.empty()) return 0.0;
  const double cross = inner_L2(poisson_inverse(w), w);
  return 0.5 * (quad + cross);
}

double energy_W0(const VectorModeField& w, double radius_limit) {
  return energy_W0(w[0], radius_limit) + energy_W0(w[1], radius_limit);
}

double norm_Y_limited(const ModeField& w, double radius_limit) {
  const GridPtr& g = w.grid();
  const Vec wt = limited_weights(g, radius_limit);
  const Vec ig = sample(g, [](double r) { return 1.0 / gaussian_G(r); });
  double s = 0.0;
  for (const auto& [k, p] : w.entries()) {
    const double ang = k.n == 0 ? 2.0 * kPi : kPi;
    s += ang * wt.dot(p.values.cwiseAbs2().cwiseProduct(ig));
  }
  return std::sqrt(s);
}

double norm_Y_limited(const VectorModeField& w, double radius_limit) {
  const double a = norm_Y_limited(w[0], radius_limit), b = norm_Y_limited(w[1], radius_limit);
  return std::sqrt(a * a + b * b);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LineFit f{c(0), c(1), std::sqrt((A * c - b).squaredNorm() / n)};
  return f;
}

LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.size() != x.size()) throw std::invalid_argument("fit_through_origin: need points");
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  LineFit f;
  f.slope = sxy / sxx;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += std::pow(y[i] - f.slope * x[i], 2);
  f.rms_residual = std::sqrt(r2 / x.size());
  return f;
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] == 0.0) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
    (y[i] > 0.0 ? pos : neg)++;
  }
  const LineFit l = fit_line(lx, ly);
  PowerFit p;
  p.exponent = l.slope;
  p.coefficient = std::exp(l.intercept);
  p.sign = pos > 0 && neg == 0 ? 1 : (neg > 0 && pos == 0 ? -1 : 0);
  if (p.sign < 0) p.coefficient = -p.coefficient;
  return p;
}

double fit_coefficient(const std::vector<double>& x, const std::vector<double>& y, double p) {
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b = std::pow(x[i], p);
    sxy += b * y[i];
    sxx += b * b;
  }
  return sxy / sxx;
}

Perturbation measure_perturbation(const GridField& w, const EpsilonSeries& s,
                                  const std::array<Eigen::Vector2d, 2>& centers, double theta, double t, double nu,
                                  const ViewOptions& opt) {
  const Circulations& c = s.circ;
  const double sc = std::sqrt(nu * t);
  const double eps = sc / c.d;
  Perturbation out;
  out.rho_limit = std::min(opt.rho_limit, 0.5 / eps);
  ViewOptions vo = opt;
  vo.rho_limit = out.rho_limit;
  const VectorModeField approx = s.omega(eps, nu);
  const GridPtr& g = s.grid;
  const Eigen::Vector2d e(std::cos(theta), std::sin(theta)), ep(-std::sin(theta), std::cos(theta));
  out.omega = VectorModeField(g);
  const int K = std::max(opt.angles, 2 * opt.max_mode + 2);
  for (int i = 0; i < 2; ++i) {
    const int io = 1 - i;
    ModeField view = self_similar_view(w, centers[i], theta, t, nu, g, vo);
    // partner's approximate profile seen from this core, on the same samples
    const Eigen::Vector2d off = centers[i] - centers[io];
    const Eigen::Vector2d shift(off.dot(e) / sc, off.dot(ep) / sc);
    std::vector<Vec> cs(opt.max_mode + 1, Vec::Zero(g->size())), sn(opt.max_mode + 1, Vec::Zero(g->size()));
    for (int j = 0; j < g->size(); ++j) {
      const double rho = g->node(j);
      if (rho > out.rho_limit) break;
      std::vector<double> vals(K);
      for (int m = 0; m < K; ++m) {
        const double ph = 2.0 * kPi * m / K;
        const Eigen::Vector2d xi = rho * Eigen::Vector2d(std::cos(ph), std::sin(ph)) + shift;
        vals[m] = approx[io].eval(xi.norm(), std::atan2(xi(1), xi(0)));
      }
      for (int n = 0; n <= opt.max_mode; ++n) {
        double ac = 0.0, as = 0.0;
        for (int m = 0; m < K; ++m) {
          const double ph = 2.0 * kPi * m / K;
          ac += vals[m] * std::cos(n * ph);
          as += vals[m] * std::sin(n * ph);
        }
        cs[n](j) = (n == 0 ? 1.0 : 2.0) * ac / K;
        sn[n](j) = 2.0 * as / K;
      }
    }
    ModeField partner(g);
    for (int n = 0; n <= opt.max_mode; ++n) {
      partner.set(n, Parity::Cos, cs[n]);
      if (n > 0) partner.set(n, Parity::Sin, sn[n]);
    }
    ModeField own = truncate(approx[i], out.rho_limit);
    // drop approximate modes above the view's resolution
    ModeField own_f(g);
    for (const auto& [k, p] : own.entries())
      if (k.n <= opt.max_mode) own_f.set(k.n, k.parity, p.values);
    ModeField om = view - partner - own_f;
    // truncation leaves a small mass; the perturbation is taken mass-free
    const double m = mass_and_moment(om, out.rho_limit).mass;
    om.axpy(-m, truncate(field_G(g), out.rho_limit));
    out.omega[i] = om.pruned();
  }
  return out;
}

namespace {
struct StopRun {};
}  // namespace

PairTrajectory run_experiment(const ExperimentConfig& cfg, EpsilonSeries* series_out) {
  const Circulations& c = cfg.circ;
  c.validate();
  cfg.solver.validate(c.d);
  PairTrajectory traj;
  for (const auto& wmsg : c.validity_warnings()) traj.warnings.push_back(wmsg);
  const GridPtr grid = RadialGrid::make(cfg.radial_n, cfg.radial_max);
  const EpsilonSeries s = construct_approximation(c, cfg.order, grid);
  const BetaTable bt = beta_coefficients(s);
  std::vector<double> beta = bt.normalized;
  if (beta.size() < 5) {
    beta.resize(5, 0.0);
    beta[4] = bt.beta4_closed_form;
  }
  const auto alpha = s.alpha_coefficients();
  const double nu = cfg.solver.nu, t0 = cfg.solver.t0;
  const double factor = cfg.torus_correction ? torus_rate_factor(c.d, cfg.solver.box) : 1.0;
  const double rate = c.gamma() / (2.0 * kPi * c.d * c.d);
  const double cap = std::max(0.1, nu * cfg.solver.t_end / (c.d * c.d));
  // the run starts at angle 0 at t0; the predicted phase is shifted to match
  auto predicted_theta = [&](double t) {
    const double drift0 = corrected_phase(c, beta, nu, t0, cap).theta - rate * t0;
    const double drift = corrected_phase(c, beta, nu, t, cap).theta - rate * t;
    return factor * rate * (t - t0) + (drift - drift0);
  };
  auto predicted_centers = [&](double t) {
    const double th = predicted_theta(t);
    const double eps = std::sqrt(nu * t) / c.d;
    double a = 0.0, p = 1.0;
    for (double co : alpha) {
      a += co * p;
      p *= eps;
    }
    const Eigen::Vector2d dir(std::cos(th), std::sin(th));
    return std::array<Eigen::Vector2d, 2>{a * c.ell(0) * dir, a * c.ell(1) * dir};
  };

  GridField init = init_superposed_oseen(c, cfg.solver);
  std::array<Eigen::Vector2d, 2> prev = {Eigen::Vector2d(c.ell(0), 0.0), Eigen::Vector2d(c.ell(1), 0.0)};
  double prev_theta = 0.0;
  bool have_prev = false;
  double prev_t = t0;
  const double m0 = init.mass();
  GridField lost_field;

  auto probe = [&](const GridField& w, long) {
    if (!traj.records.empty() && !(w.time > traj.records.back().t)) return;
    PairRecord r;
    r.t = w.time;
    r.eps = std::sqrt(nu * r.t) / c.d;
    r.theta_predicted = predicted_theta(r.t);
    const auto pred = predicted_centers(r.t);
    // guesses: previous centers advanced at the point-vortex rate
    std::array<Eigen::Vector2d, 2> guess = pred;
    if (have_prev) {
      const double dth = factor * rate * (r.t - prev_t);
      const Eigen::Matrix2d rot = Eigen::Rotation2Dd(dth).toRotationMatrix();
      guess = {rot * prev[0], rot * prev[1]};
    }
    std::array<Eigen::Vector2d, 2> ctr;
    try {
      ctr = extract_centers(w, guess, c);
    } catch (const ExtractionError& e) {
      traj.tracking_lost = e.what();
      traj.lost_at = w.time;
      lost_field = w;
      throw StopRun{};
    }
    // each disk now holds both cores: the pair has merged and the centroids stop tracking vortices
    if ((ctr[0] - ctr[1]).norm() < CenterOptions{}.radius * c.d) {
      std::ostringstream os;
      os << "centers " << (ctr[0] - ctr[1]).norm() << " apart, inside the extraction radius (merged pair)";
      traj.tracking_lost = os.str();
      traj.lost_at = w.time;
      lost_field = w;
      throw StopRun{};
    }
    r.x1 = ctr[0];
    r.x2 = ctr[1];
    const Eigen::Vector2d sep = ctr[0] - ctr[1];
    double th = std::atan2(sep(1), sep(0));
    const double ref = have_prev ? prev_theta + factor * rate * (r.t - prev_t) : 0.0;
    th = ref + wrap_angle(th - ref);
    r.theta_measured = th;
    r.l1_error = l1_error(w, c, pred, r.t, nu);
    r.mass = w.mass();
    r.moment = w.moment();
    if (cfg.probes && cfg.order >= 2) {
      const Perturbation pert = measure_perturbation(w, s, ctr, th, r.t, nu);
      const PseudoMomentaSet pm = build_pseudo_momenta(s, r.eps);
      const Projection pr = project_perturbation(pert.omega, pm);
      r.mu_o = pr.mu_o;
      r.mu_e = pr.mu_e;
      r.energy_w0 = energy_W0(pr.remainder, pert.rho_limit);
      r.perturbation_norm = norm_Y_limited(pr.remainder, pert.rho_limit);
    }
    if (std::abs(r.mass - m0) > 1e-12 * std::abs(c.gamma()))
      traj.warnings.push_back("mass drift " + std::to_string(r.mass - m0) + " at t = " + std::to_string(r.t));
    traj.records.push_back(r);
    prev = ctr;
    prev_theta = th;
    prev_t = r.t;
    have_prev = true;
  };
  GridField fin;
  try {
    fin = run_solver(init, cfg.solver, probe, &traj.stats);
  } catch (const StopRun&) {
    fin = lost_field;
    std::ostringstream os;
    os << "tracking lost at t = " << traj.lost_at << ": " << traj.tracking_lost;
    traj.warnings.push_back(os.str());
  }
  for (const auto& wmsg : traj.stats.warnings) traj.warnings.push_back(wmsg);
  if (!cfg.checkpoint.empty()) write_checkpoint(fin, cfg.checkpoint);
  if (series_out) *series_out = s;
  return traj;
}

}  // namespace vortexlab

namespace vortexlab {

OffsetPowerFit fit_power_offset(const std::vector<double>& x, const std::vector<double>& y, double x0, double p_lo,
                                double p_hi) {
  if (x.size() < 3 || y.size() != x.size()) throw std::invalid_argument("fit_power_offset: need >= 3 points");
  auto solve = [&](double p) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double b = std::pow(x[i], p) - std::pow(x0, p);
      sxy += b * y[i];
      sxx += b * b;
    }
    OffsetPowerFit f{p, sxy / sxx, 0.0};
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r2 += std::pow(y[i] - f.coefficient * (std::pow(x[i], p) - std::pow(x0, p)), 2);
    f.rms_residual = std::sqrt(r2 / x.size());
    return f;
  };
  // coarse scan, then golden section around the best bracket
  const int nscan = 100;
  int best = 0;
  double best_r = 1e300;
  for (int k = 0; k <= nscan; ++k) {
    const double r = solve(p_lo + (p_hi - p_lo) * k / nscan).rms_residual;
    if (r < best_r) {
      best_r = r;
      best = k;
    }
  }
  double a = p_lo + (p_hi - p_lo) * std::max(best - 1, 0) / nscan;
  double b = p_lo + (p_hi - p_lo) * std::min(best + 1, nscan) / nscan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - g * (b - a), c2 = a + g * (b - a);
  double f1 = solve(c1).rms_residual, f2 = solve(c2).rms_residual;
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - g * (b - a);
      f1 = solve(c1).rms_residual;
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + g * (b - a);
      f2 = solve(c2).rms_residual;
    }
  }
  return solve(0.5 * (a + b));
}

PairAnalysis analyze_pair(const std::vector<PairRecord>& records, const Circulations& c, double nu,
                          const AnalysisOptions& opt) {
  if (records.size() < 3) throw std::invalid_argument("analyze_pair: need >= 3 records");
  PairAnalysis a;
  const double d2 = c.d * c.d;
  std::vector<double> x, y;
  for (const auto& r : records) {
    x.push_back(nu * r.t / d2);
    y.push_back(r.l1_error);
  }
  const LineFit lf = fit_through_origin(x, y);
  a.l1_slope = lf.slope;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - lf.slope * x[i]));
  a.l1_rel_residual = y.back() != 0.0 ? worst / std::abs(y.back()) : 1e300;
  a.l1_pass = a.l1_rel_residual <= opt.l1_tol;

  const double t0 = opt.t0 > 0.0 ? opt.t0 : records.front().t;
  a.t_lo = opt.drift_t_lo > 0.0 ? opt.drift_t_lo : 2.0 * t0;
  a.t_hi = opt.drift_t_hi > 0.0 ? opt.drift_t_hi : 10.0 * a.t_lo;
  const double rate = c.gamma() / (2.0 * kPi * d2);
  std::vector<double> tt, dd;
  for (const auto& r : records)
    if (r.t >= a.t_lo * (1.0 - 1e-12) && r.t <= a.t_hi * (1.0 + 1e-12)) {
      tt.push_back(r.t);
      dd.push_back(r.theta_measured - opt.rate_factor * rate * (r.t - t0));
    }
  a.drift_points = static_cast<int>(tt.size());
  a.predicted_coefficient = rate * opt.beta4 * nu * nu / (3.0 * d2 * d2);
  a.predicted_sign = a.predicted_coefficient > 0.0 ? 1 : (a.predicted_coefficient < 0.0 ? -1 : 0);
  if (tt.size() >= 3) {
    const OffsetPowerFit pf = fit_power_offset(tt, dd, t0);
    a.drift_exponent = pf.exponent;
    // coefficient of the cubic law itself
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) {
      const double b = std::pow(tt[i], 3) - std::pow(t0, 3);
      sxy += b * dd[i];
      sxx += b * b;
    }
    a.drift_coefficient = sxy / sxx;
    a.drift_sign = a.drift_coefficient > 0.0 ? 1 : (a.drift_coefficient < 0.0 ? -1 : 0);
    a.coefficient_rel_error = a.predicted_coefficient != 0.0
                                  ? std::abs(a.drift_coefficient - a.predicted_coefficient) / std::abs(a.predicted_coefficient)
                                  : 1e300;
    a.exponent_pass = std::abs(a.drift_exponent - 3.0) <= opt.exponent_tol;
    a.coefficient_pass = a.coefficient_rel_error <= opt.coefficient_tol;
    a.sign_pass = a.drift_sign != 0 && a.drift_sign == a.predicted_sign;
  }
  return a;
}

}  // namespace vortexlab
