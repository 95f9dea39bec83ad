#include "vortexlab/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vortexlab {

Points point_vortex_rhs(const Points& z, const std::vector<double>& gamma) {
  if (z.size() != gamma.size()) throw std::invalid_argument("point_vortex_rhs: size mismatch");
  Points dz(z.size(), Eigen::Vector2d::Zero());
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const Eigen::Vector2d r = z[i] - z[j];
      const double r2 = r.squaredNorm();
      if (r2 == 0.0) throw std::domain_error("point_vortex_rhs: coincident vortices " + std::to_string(i) + ", " + std::to_string(j));
      const Eigen::Vector2d k = Eigen::Vector2d(-r(1), r(0)) / (2.0 * kPi * r2);
      dz[i] += gamma[j] * k;
      dz[j] -= gamma[i] * k;
    }
  return dz;
}

double kirchhoff_hamiltonian(const Points& z, const std::vector<double>& gamma) {
  double h = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) h += gamma[i] * gamma[j] * std::log((z[i] - z[j]).norm());
  return h;
}

Eigen::Vector2d linear_impulse(const Points& z, const std::vector<double>& gamma) {
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < z.size(); ++i) p += gamma[i] * z[i];
  return p;
}

double angular_impulse(const Points& z, const std::vector<double>& gamma) {
  double a = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) a += gamma[i] * z[i].squaredNorm();
  return a;
}

namespace {

using State = Eigen::VectorXd;

State pack(const Points& z) {
  State s(2 * z.size());
  for (std::size_t i = 0; i < z.size(); ++i) s.segment<2>(2 * i) = z[i];
  return s;
}

Points unpack(const State& s) {
  Points z(s.size() / 2);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = s.segment<2>(2 * i);
  return z;
}

double min_distance(const Points& z) {
  double m = 1e300;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) m = std::min(m, (z[i] - z[j]).norm());
  return m;
}

}  // namespace

NBodyTrajectory integrate_n_body(const Points& z0, const std::vector<double>& gamma, double t_end,
                                 const NBodyOptions& opt) {
  if (z0.size() != gamma.size() || z0.empty()) throw std::invalid_argument("integrate_n_body: size mismatch");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("integrate_n_body: tol must be positive");
  // Dormand-Prince coefficients
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                      e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&](const State& s) { return pack(point_vortex_rhs(unpack(s), gamma)); };

  NBodyTrajectory out;
  State y = pack(z0);
  double t = 0.0;
  out.t.push_back(t);
  out.z.push_back(z0);
  if (t_end <= 0.0) return out;

  State k1 = f(y);
  double h = opt.h0;
  if (h <= 0.0) {
    const double v = std::max(k1.cwiseAbs().maxCoeff(), 1e-12);
    const double scale = std::max(min_distance(z0), 1e-12);
    h = 0.01 * scale / v;
  }
  double err_prev = 1e-4;
  const double beta = 0.04, alpha = 0.2 - 0.75 * beta;  // PI exponents
  while (t < t_end) {
    if (out.accepted + out.rejected > opt.max_steps) throw std::runtime_error("integrate_n_body: step limit exceeded");
    h = std::min(h, t_end - t);
    const State k2 = f(y + h * a21 * k1);
    const State k3 = f(y + h * (a31 * k1 + a32 * k2));
    const State k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(y5);
    const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      // a tenth of tol keeps the global error over ten periods near 1e2 tol
      const double sc = 0.1 * opt.tol * (1.0 + std::max(std::abs(y(i)), std::abs(y5(i))));
      err = std::max(err, std::abs(e(i)) / sc);
    }
    if (!std::isfinite(err)) throw std::runtime_error("integrate_n_body: non-finite error estimate");
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
      ++out.accepted;
      const Points z = unpack(y);
      const double md = min_distance(z);
      if (md < opt.min_distance) {
        std::ostringstream os;
        os << "integrate_n_body: collision detected at t = " << t << " (min distance " << md << ")";
        throw CollisionError(os.str(), t);
      }
      out.t.push_back(t);
      out.z.push_back(z);
      double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -alpha) * std::pow(err_prev, beta);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = std::max(err, 1e-4);
    } else {
      ++out.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -alpha));
    }
    if (h < 1e-14 * std::max(1.0, t)) throw std::runtime_error("integrate_n_body: step size underflow");
  }
  return out;
}

PairState two_vortex_exact(const Circulations& c, double t) {
  c.validate();
  PairState s;
  s.time = t;
  s.theta = c.gamma() * t / (2.0 * kPi * c.d * c.d);
  const Eigen::Vector2d dir(std::cos(s.theta), std::sin(s.theta));
  s.x1 = c.ell(0) * dir;
  s.x2 = c.ell(1) * dir;
  return s;
}

PhasePrediction corrected_phase(const Circulations& c, const std::vector<double>& beta, double nu, double t,
                                double cap) {
  c.validate();
  const double d = c.d;
  if (nu * t / (d * d) > cap)
    throw std::domain_error("corrected_phase: nu t / d^2 = " + std::to_string(nu * t / (d * d)) +
                            " exceeds the validity cap " + std::to_string(cap));
  const double rate = c.gamma() / (2.0 * kPi * d * d);
  PhasePrediction p;
  double th = t, thd = 1.0;
  for (std::size_t k = 1; k < beta.size(); ++k) {
    if (beta[k] == 0.0) continue;
    const double kk = static_cast<double>(k);
    const double s = std::pow(nu * t, 0.5 * kk) / std::pow(d, kk);
    th += 2.0 * beta[k] / (kk + 2.0) * s * t;
    thd += beta[k] * s;
  }
  p.theta = rate * th;
  p.theta_dot = rate * thd;
  return p;
}

PairState predicted_state(const Circulations& c, const std::vector<double>& beta, double nu, double t,
                          const std::vector<double>& alpha_coefficients, double cap) {
  const PhasePrediction ph = corrected_phase(c, beta, nu, t, cap);
  PairState s;
  s.time = t;
  s.theta = ph.theta;
  const double eps = std::sqrt(nu * t) / c.d;
  if (!alpha_coefficients.empty()) {
    double a = 0.0, p = 1.0;
    for (double co : alpha_coefficients) {
      a += co * p;
      p *= eps;
    }
    s.alpha = a;
  }
  const Eigen::Vector2d dir(std::cos(s.theta), std::sin(s.theta));
  s.x1 = s.alpha * c.ell(0) * dir;
  s.x2 = s.alpha * c.ell(1) * dir;
  return s;
}

}  // namespace vortexlab
