#pragma once

#include <Eigen/Dense>

#include <memory>

namespace vortexlab {

using Vec = Eigen::VectorXd;

// Graded radial nodes rho_j = rho_max (j/N)^p, j = 1..N, on a uniform mapped variable s = j/N.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> make(int n = 2048, double rho_max = 24.0, double grading = 1.5);

  int size() const { return n_; }
  double rho_max() const { return rho_max_; }
  double grading() const { return grading_; }
  const Vec& nodes() const { return nodes_; }
  double node(int i) const { return nodes_(i); }
  // Weights for the integral of f(rho) rho drho over (0, rho_max].
  const Vec& weights() const { return weights_; }
  // Weights for the plain integral of f(rho) drho.
  const Vec& line_weights() const { return line_weights_; }

  double integrate(const Vec& f) const { return weights_.dot(f); }

  // Radial derivatives from 5-point stencils. Nodes across the origin are reflected with
  // f(-rho) = parity * f(rho), parity = (-1)^n for angular mode n.
  Vec d1(const Vec& f, int parity) const;
  Vec d2(const Vec& f, int parity) const;

  // Running integrals of f(rho) drho from 0 to rho_i, and from rho_i to rho_max,
  // using 4th-order panels in s; f is taken to vanish at the origin.
  Vec cumulative(const Vec& f) const;
  Vec tail(const Vec& f) const;

  // Local cubic interpolation in s; returns 0 beyond rho_max.
  double interpolate(const Vec& f, int parity, double rho) const;

  // The per-node stencil data (extended signed indices; negative k means reflected node -k-1).
  const Eigen::Matrix<int, Eigen::Dynamic, 5>& stencil_index() const { return st_idx_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 5>& stencil_d1() const { return st_d1_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 5>& stencil_d2() const { return st_d2_; }

 private:
  RadialGrid(int n, double rho_max, double grading);
  Vec panels(const Vec& f) const;

  int n_;
  double rho_max_, grading_, ds_;
  Vec nodes_, weights_, line_weights_, jac_;
  Eigen::Matrix<int, Eigen::Dynamic, 5> st_idx_;
  Eigen::Matrix<double, Eigen::Dynamic, 5> st_d1_, st_d2_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Finite-difference weights (Fornberg) for derivatives 0..m at x0 from nodes x.
Eigen::MatrixXd fd_weights(double x0, const Eigen::VectorXd& x, int m);

}  // namespace vortexlab
