#include "vortexlab/radial_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace vortexlab {

Eigen::MatrixXd fd_weights(double x0, const Eigen::VectorXd& x, int m) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0, c4 = x(0) - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

std::shared_ptr<const RadialGrid> RadialGrid::make(int n, double rho_max, double grading) {
  if (n < 8) throw std::invalid_argument("RadialGrid: need at least 8 nodes");
  if (!(rho_max > 0.0) || !(grading >= 1.0)) throw std::invalid_argument("RadialGrid: bad rho_max or grading");
  return std::shared_ptr<const RadialGrid>(new RadialGrid(n, rho_max, grading));
}

RadialGrid::RadialGrid(int n, double rho_max, double grading)
    : n_(n), rho_max_(rho_max), grading_(grading), ds_(1.0 / n) {
  nodes_.resize(n);
  jac_.resize(n);
  for (int j = 1; j <= n; ++j) {
    const double s = static_cast<double>(j) / n;
    nodes_(j - 1) = rho_max * std::pow(s, grading);
    jac_(j - 1) = rho_max * grading * std::pow(s, grading - 1.0);
  }
  // trapezoid in s; the s = 0 end contributes nothing since rho'(0) rho(0) = 0
  line_weights_ = ds_ * jac_;
  line_weights_(n - 1) *= 0.5;
  weights_ = line_weights_.cwiseProduct(nodes_);

  st_idx_.resize(n, 5);
  st_d1_.resize(n, 5);
  st_d2_.resize(n, 5);
  auto pos = [&](int k) { return k >= 0 ? nodes_(k) : -nodes_(-k - 1); };
  for (int i = 0; i < n; ++i) {
    int lo = std::min(i - 2, n - 5);
    Eigen::VectorXd x(5);
    for (int q = 0; q < 5; ++q) {
      st_idx_(i, q) = lo + q;
      x(q) = pos(lo + q);
    }
    const Eigen::MatrixXd w = fd_weights(nodes_(i), x, 2);
    for (int q = 0; q < 5; ++q) {
      st_d1_(i, q) = w(q, 1);
      st_d2_(i, q) = w(q, 2);
    }
  }
}

namespace {

Vec apply_stencil(const Eigen::Matrix<int, Eigen::Dynamic, 5>& idx,
                  const Eigen::Matrix<double, Eigen::Dynamic, 5>& w, const Vec& f, int parity) {
  const int n = static_cast<int>(f.size());
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) {
      const int k = idx(i, q);
      acc += w(i, q) * (k >= 0 ? f(k) : parity * f(-k - 1));
    }
    out(i) = acc;
  }
  return out;
}

}  // namespace

Vec RadialGrid::d1(const Vec& f, int parity) const { return apply_stencil(st_idx_, st_d1_, f, parity); }

Vec RadialGrid::d2(const Vec& f, int parity) const { return apply_stencil(st_idx_, st_d2_, f, parity); }

// Integrals over [s_k, s_{k+1}], k = 0..N-1, of g(s) = f(rho(s)) rho'(s), with g(0) = 0.
Vec RadialGrid::panels(const Vec& f) const {
  const int n = n_;
  Vec g(n + 1);
  g(0) = 0.0;
  g.tail(n) = f.cwiseProduct(jac_);
  Vec p(n);
  const double c = ds_ / 24.0;
  p(0) = c * (9.0 * g(0) + 19.0 * g(1) - 5.0 * g(2) + g(3));
  for (int k = 1; k <= n - 2; ++k) p(k) = c * (-g(k - 1) + 13.0 * g(k) + 13.0 * g(k + 1) - g(k + 2));
  p(n - 1) = c * (g(n - 3) - 5.0 * g(n - 2) + 19.0 * g(n - 1) + 9.0 * g(n));
  return p;
}

Vec RadialGrid::cumulative(const Vec& f) const {
  const Vec p = panels(f);
  Vec out(n_);
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) {
    acc += p(i);
    out(i) = acc;
  }
  return out;
}

Vec RadialGrid::tail(const Vec& f) const {
  const Vec p = panels(f);
  Vec out(n_);
  double acc = 0.0;
  for (int i = n_ - 1; i >= 0; --i) {
    out(i) = acc;
    acc += p(i);
  }
  return out;
}

double RadialGrid::interpolate(const Vec& f, int parity, double rho) const {
  if (rho < 0.0) return parity * interpolate(f, parity, -rho);
  if (rho > rho_max_) return 0.0;
  const double s = std::pow(rho / rho_max_, 1.0 / grading_);
  // extended node k <-> s = (k+1)/N, with reflection across s = 0
  const double t = s * n_ - 1.0;
  int k0 = static_cast<int>(std::floor(t)) - 1;
  k0 = std::min(k0, n_ - 4);
  auto val = [&](int k) { return k >= 0 ? f(k) : parity * f(-k - 1); };
  auto pos = [&](int k) { return k >= 0 ? nodes_(k) : -nodes_(-k - 1); };
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (rho - pos(k0 + b)) / (pos(k0 + a) - pos(k0 + b));
    acc += l * val(k0 + a);
  }
  return acc;
}

}  // namespace vortexlab
