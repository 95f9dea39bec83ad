#pragma once

#include "vortexlab/mode_operators.hpp"

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace vortexlab {

// Two circulations with separation d. Index i = 0, 1 stands for vortex 1, 2.
struct Circulations {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double d = 1.0;

  double gamma() const { return gamma1 + gamma2; }
  double gamma_i(int i) const { return i == 0 ? gamma1 : gamma2; }
  double gamma_other(int i) const { return i == 0 ? gamma2 : gamma1; }
  // +1 for vortex 1, -1 for vortex 2
  static double kappa(int i) { return i == 0 ? 1.0 : -1.0; }
  // initial radius along the pair axis; gamma1 ell(0) + gamma2 ell(1) = 0
  double ell(int i) const { return kappa(i) * gamma_other(i) / gamma() * d; }

  // Throws std::invalid_argument for gamma = 0 or a vanishing circulation.
  void validate() const;
  // Regimes where the asymptotic constants degenerate.
  std::vector<std::string> validity_warnings() const;
};

// Complex moments mu_j = int (xi1 + i xi2)^j f, j = 0..jmax.
std::vector<std::complex<double>> complex_moments(const ModeField& f, int jmax);

// Far-field expansion of Delta^{-1} f (xi + e1 / lambda):
//   log_coefficient * log(1/|lambda|) + sum_n lambda^n terms[n-1](xi)
// Each term is a polynomial of degree n built from the moments of f. Constant pieces
// are kept in the terms unless drop_constants is set.
struct MomentExpansion {
  double log_coefficient = 0.0;
  std::vector<ModeField> terms;
};
MomentExpansion moment_expansion(const ModeField& f, int order, bool drop_constants = false);
ModeField moment_expansion_term(const ModeField& f, int n, bool drop_constants = false);
// The same term from precomputed moments.
ModeField moment_expansion_term(const GridPtr& g, const std::vector<std::complex<double>>& mu, int n,
                                bool drop_constants);

// Radial factors of the second-order profiles: Lambda[e cos 2t] = -(rho^2/16 pi^2) e^{-rho^2/4} sin 2t,
// Lambda[v sin 2t] = (L - 1)[e cos 2t].
struct Order2Profiles {
  Vec euler;
  Vec viscous;
  double euler_residual = 0.0;    // relative max-norm residual of the defining equation
  double viscous_residual = 0.0;
};
Order2Profiles build_order2(const GridPtr& g, int refine_steps = 3);
// Gamma_other e cos 2t for each vortex.
VectorModeField order2_euler_field(const GridPtr& g, const Circulations& c, const Order2Profiles& p);
// (Gamma_other / Gamma_i) v sin 2t for each vortex.
VectorModeField order2_viscous_field(const GridPtr& g, const Circulations& c, const Order2Profiles& p);

struct EpsilonSeries {
  static constexpr const char* kSchema = "vortexlab.epsilon_series/1";

  Circulations circ;
  GridPtr grid;
  int order = 0;
  // index k = 0..order
  std::vector<VectorModeField> euler, viscous;
  // index k = 0..order-1; the frame angular velocity is sum eps^k (te_k + nu tv_k)
  std::vector<double> theta_dot_euler, theta_dot_viscous, alpha_dot_viscous;
  // solvability projections and other diagnostics recorded during construction
  std::vector<std::string> log;

  // alpha_a = 1 + sum_{k>=2} (2/k) eps^k alpha_dot_viscous[k-2]; coefficient list in eps
  std::vector<double> alpha_coefficients() const;
  double alpha(double eps) const;
  // frame angular velocity (negative of the physical rotation rate)
  double theta_dot(double eps, double nu) const;
  double theta_dot_euler_at(double eps) const;
  VectorModeField omega_euler(double eps) const;
  VectorModeField omega(double eps, double nu) const;
};

struct ConstructionOptions {
  int lambda_refine = 3;        // defect-correction sweeps in the Lambda solves
  int resolvent_refine = 8;
  double solvability_tol = 1e-8;  // relative mass/moment defect projected out of H0, H1
};

// Order-by-order construction of the approximate solution for 1 <= order <= 12.
EpsilonSeries construct_approximation(const Circulations& c, int order, const GridPtr& g = nullptr,
                                      const ConstructionOptions& opt = {});

// Coefficients of the residual as a series: key (k, p) holds the eps^k nu^p part, p in {-1, 0, 1}.
using ResidualSeries = std::map<std::pair<int, int>, VectorModeField>;
// Uses the series data up to its order; unknown higher coefficients are zero. Terms of
// eps-order above kmax are dropped.
ResidualSeries residual_series(const EpsilonSeries& s, int kmax);

struct ResidualParts {
  VectorModeField inv_nu;  // coefficient of 1/nu
  VectorModeField nu0;
  VectorModeField nu1;     // coefficient of nu
};
// The residual at a given eps split by powers of nu, summed through eps^(order + extra_orders).
ResidualParts residual_parts(const EpsilonSeries& s, double eps, int extra_orders = 3);
VectorModeField residual(const EpsilonSeries& s, double eps, double nu, int extra_orders = 3);
// The same from precomputed coefficients.
ResidualParts residual_parts(const ResidualSeries& rs, const GridPtr& g, double eps);

struct BetaTable {
  // beta_k for k = 0..order-1 in the convention theta_phys' = (Gamma/2pi)(1 + sum beta_k (nu t)^{k/2})
  std::vector<double> normalized;
  // -theta_dot_euler[k]
  std::vector<double> raw;
  // viscous parts -theta_dot_viscous[k] (multiply nu eps^k)
  std::vector<double> viscous_raw;
  // int_0^inf e rho^3 drho for the order-2 Euler profile
  double profile_integral = 0.0;
  // the same eps^4 coefficient written through the angular integral of (xi1^2 - xi2^2)
  double angular_form = 0.0;
  double integral_form = 0.0;
  // pi (G1^2 + G2^2)/(G1 G2) * profile_integral
  double beta4_closed_form = 0.0;
  std::vector<std::string> warnings;
};
BetaTable beta_coefficients(const EpsilonSeries& s);

}  // namespace vortexlab
