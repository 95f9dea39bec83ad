#pragma once

#include "vortexlab/asymptotics.hpp"

#include <Eigen/Dense>

namespace vortexlab {

// Y1 = (1, 1), Y2 = (gamma2, -gamma1)
Eigen::Vector2d y1_vector();
Eigen::Vector2d y2_vector(const Circulations& c);
// (a0 f, a1 f)
VectorModeField times_vector(const Eigen::Vector2d& a, const ModeField& f);

// Component i: Delta^{-1} w_i plus the partner's stream seen at shift kappa_i alpha / eps,
// expanded through n_terms. Spatial constants are dropped; the log constant
// (1/2pi) log(alpha/eps) m[w_other] of each component goes to *log_constant.
VectorModeField coupled_stream_B(const VectorModeField& w, double eps, double alpha, int n_terms,
                                 Eigen::Vector2d* log_constant = nullptr);

// xi1 Y2 + (eps Gamma / 2 alpha) |xi|^2 Y1
VectorModeField frame_stream_X(const GridPtr& g, double eps, double alpha, const Circulations& c);
// (Y2 d_2 + (eps Gamma / alpha) Y1 d_theta) w, evaluated directly
VectorModeField frame_derivative(const VectorModeField& w, double eps, double alpha, const Circulations& c);
// The same through the bracket {frame_stream_X, w}_V.
VectorModeField frame_derivative_bracket(const VectorModeField& w, double eps, double alpha, const Circulations& c);

// Euler stream B_a Omega^E_a + (eps/Gamma) theta_dot^E alpha X, constants dropped, shifted terms
// through order + 2.
VectorModeField euler_stream(const EpsilonSeries& s, double eps);
// {Psi^E_a, w}_V + {B_a w, Omega^E_a}_V
VectorModeField lambda_E_apply(const VectorModeField& w, const EpsilonSeries& s, double eps);
// The L^2 adjoint: -{Psi^E_a, r}_V - B_a {r, Omega^E_a}_V
VectorModeField lambda_E_star_apply(const VectorModeField& r, const EpsilonSeries& s, double eps);
// eps^ell coefficient of the adjoint, ell in {0, 1, 2}; throws std::invalid_argument otherwise.
// ell = 0 is diag(gamma1 Lambda*, gamma2 Lambda*).
VectorModeField lambda_E_star_order(int ell, const VectorModeField& r, const EpsilonSeries& s);
// Closed form of the ell = 2 coefficient on (mu1 xi2, mu2 xi2).
VectorModeField lambda_E_star2_closed_form(double mu1, double mu2, const Circulations& c, const GridPtr& g);

struct PseudoMomentaSet {
  Circulations circ;
  double eps = 0.0;
  double alpha = 1.0;
  int order = 2;
  // te, to, e, o
  VectorModeField rho_te, rho_to, rho_e, rho_o;
  VectorModeField f_te, f_to, f_e, f_o;
  // lambda^e as a series in eps (coefficients 0, 0, Gamma/pi) and its value at eps
  std::vector<double> lambda_e_series;
  double lambda_e = 0.0;

  const VectorModeField& rho(int k) const;
  const VectorModeField& f(int k) const;
};

PseudoMomentaSet build_pseudo_momenta(const EpsilonSeries& s, double eps);

// lambda^e_2 recovered from the ell = 2 adjoint applied to xi2 Y2, read off against xi1 Y2 with a
// Gaussian weight.
double lambda_e2_from_adjoint(const EpsilonSeries& s);

// I(j, k) = <f_k, rho_j>_V in the order te, to, e, o.
Eigen::Matrix4d inner_product_matrix(const PseudoMomentaSet& p);

struct Projection {
  double mu_o = 0.0, mu_e = 0.0;
  // coefficients of all four f's (te, to, e, o)
  Eigen::Vector4d coefficients = Eigen::Vector4d::Zero();
  VectorModeField remainder;
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();
};
// Solves I c = (<w, rho_j>_V) and returns the remainder w - sum c_k f_k.
// Throws std::domain_error when |b + a c / Gamma| < 1e-6 |gamma1 gamma2 gamma|.
Projection project_perturbation(const VectorModeField& w, const PseudoMomentaSet& p);

// Phase modulation Gamma lambda^e mu_o / (eps alpha).
double theta_dot_modulation(const PseudoMomentaSet& p, double mu_o);

}  // namespace vortexlab
