#pragma once

#include "vortexlab/asymptotics.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

using Points = std::vector<Eigen::Vector2d>;

struct PairState {
  double time = 0.0;
  Eigen::Vector2d x1 = Eigen::Vector2d::Zero(), x2 = Eigen::Vector2d::Zero();
  double theta = 0.0;  // unwrapped
  double alpha = 1.0;  // separation / d
};

// dz_i/dt = (1/2pi) sum_{j != i} gamma_j (z_i - z_j)^perp / |z_i - z_j|^2, perp(a, b) = (-b, a).
// Throws std::domain_error for coincident points.
Points point_vortex_rhs(const Points& z, const std::vector<double>& gamma);

// sum_i sum_{j>i} gamma_i gamma_j log|z_i - z_j|
double kirchhoff_hamiltonian(const Points& z, const std::vector<double>& gamma);
// sum_i gamma_i z_i
Eigen::Vector2d linear_impulse(const Points& z, const std::vector<double>& gamma);
// sum_i gamma_i |z_i|^2
double angular_impulse(const Points& z, const std::vector<double>& gamma);

class CollisionError : public std::runtime_error {
 public:
  CollisionError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
  double time;
};

struct NBodyTrajectory {
  std::vector<double> t;
  std::vector<Points> z;
  long accepted = 0, rejected = 0;
};

struct NBodyOptions {
  double tol = 1e-10;           // per-step absolute and relative tolerance
  double min_distance = 1e-6;   // collision threshold
  double h0 = 0.0;              // initial step (0 = automatic)
  long max_steps = 10000000;
};

// Dormand-Prince 5(4) with PI step control; every accepted step is recorded.
NBodyTrajectory integrate_n_body(const Points& z0, const std::vector<double>& gamma, double t_end,
                                 const NBodyOptions& opt = {});

// Rigid rotation at rate gamma / (2 pi d^2) with x_i = ell_i (cos, sin).
PairState two_vortex_exact(const Circulations& c, double t);

struct PhasePrediction {
  double theta = 0.0;
  double theta_dot = 0.0;
};
// theta = (G / 2 pi d^2)(t + sum_k 2 beta_k / ((k+2) d^k) nu^{k/2} t^{k/2+1}) with beta normalized
// (index k = 0, 1, ...; beta_0 is ignored). Throws std::domain_error when nu t / d^2 > cap.
PhasePrediction corrected_phase(const Circulations& c, const std::vector<double>& beta, double nu, double t,
                                double cap = 0.1);
// Centers alpha ell_i (cos theta, sin theta); alpha from the series coefficients in eps = sqrt(nu t)/d
// when given, else 1.
PairState predicted_state(const Circulations& c, const std::vector<double>& beta, double nu, double t,
                          const std::vector<double>& alpha_coefficients = {}, double cap = 0.1);

}  // namespace vortexlab
