#pragma once

#include <Eigen/Dense>

namespace vortexlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Below this argument ein() sums its power series; above it uses the E1 form.
inline constexpr double kEinSwitch = 2.0;

// Ein(x) = integral over [0, x] of (1 - e^{-t})/t. Throws std::domain_error for x < 0.
double ein(double x);
double ein_series(double x);
double ein_asymptotic(double x);

// Oseen profile (1/4pi) e^{-rho^2/4} and its radial derivative.
double gaussian_G(double rho);
double gaussian_G_prime(double rho);

// Stream function of G in the Ein normalization, and its radial derivative.
double upsilon(double rho);
double upsilon_prime(double rho);

// W0(rho) = 4 (e^{rho^2/4} - 1) / rho^2, with W0(0) = 1.
double w0_weight(double rho);

// Leading functional F0(s; gamma) and its derivative in s.
// For gamma > 0 the domain is 0 < s <= gamma/(4 pi); negative gamma uses F0(s; -g) = -F0(-s; g).
double f0(double s, double gamma);
double f0_prime(double s, double gamma);

enum class Parity { Cos, Sin };

// Q^c_n = rho^n cos(n theta), Q^s_n = rho^n sin(n theta), evaluated from (xi1 + i xi2)^n.
double harmonic_Q(int n, Parity kind, const Eigen::Vector2d& xi);
Eigen::Vector2d harmonic_Q_gradient(int n, Parity kind, const Eigen::Vector2d& xi);

}  // namespace vortexlab
