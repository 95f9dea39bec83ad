#include "vortexlab/profiles.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace vortexlab {

double ein_series(double x) {
  double term = x;  // (-1)^{k+1} x^k / k!
  double sum = x;
  for (int k = 2; k < 200; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double ein_asymptotic(double x) {
  // E1(x) = -Ei(-x)
  return kEulerGamma + std::log(x) - std::expint(-x);
}

double ein(double x) {
  if (!(x >= 0.0)) throw std::domain_error("ein: argument must be nonnegative");
  if (x == 0.0) return 0.0;
  return x <= kEinSwitch ? ein_series(x) : ein_asymptotic(x);
}

double gaussian_G(double rho) { return std::exp(-0.25 * rho * rho) / (4.0 * kPi); }

double gaussian_G_prime(double rho) { return -0.5 * rho * gaussian_G(rho); }

double upsilon(double rho) { return (ein(0.25 * rho * rho) - kEulerGamma) / (4.0 * kPi); }

double upsilon_prime(double rho) {
  if (rho == 0.0) return 0.0;
  return -std::expm1(-0.25 * rho * rho) / (2.0 * kPi * rho);
}

namespace {

// expm1(x)/x with its Taylor branch near 0
double expm1_over_x(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0;
  return std::expm1(x) / x;
}

}  // namespace

double w0_weight(double rho) { return expm1_over_x(0.25 * rho * rho); }

double f0(double s, double gamma) {
  if (gamma == 0.0) throw std::domain_error("f0: total circulation must be nonzero");
  if (gamma < 0.0) return -f0(-s, -gamma);
  if (!(s > 0.0) || s > gamma / (4.0 * kPi) * (1.0 + 1e-15))
    throw std::domain_error("f0: s outside (0, gamma/(4 pi)]");
  const double y = std::max(0.0, std::log(gamma / (4.0 * kPi * s)));
  return gamma / (4.0 * kPi) * (kEulerGamma - ein(y));
}

double f0_prime(double s, double gamma) {
  if (gamma == 0.0) throw std::domain_error("f0_prime: total circulation must be nonzero");
  if (gamma < 0.0) return f0_prime(-s, -gamma);
  if (!(s > 0.0) || s > gamma / (4.0 * kPi) * (1.0 + 1e-15))
    throw std::domain_error("f0_prime: s outside (0, gamma/(4 pi)]");
  const double y = std::max(0.0, std::log(gamma / (4.0 * kPi * s)));
  return expm1_over_x(y);
}

double harmonic_Q(int n, Parity kind, const Eigen::Vector2d& xi) {
  if (n < 0) throw std::domain_error("harmonic_Q: negative mode");
  if (n == 0) {
    if (kind == Parity::Sin) throw std::domain_error("harmonic_Q: Q^s_0 is undefined");
    return 1.0;
  }
  const std::complex<double> z(xi(0), xi(1));
  std::complex<double> p(1.0, 0.0);
  for (int k = 0; k < n; ++k) p *= z;
  return kind == Parity::Cos ? p.real() : p.imag();
}

Eigen::Vector2d harmonic_Q_gradient(int n, Parity kind, const Eigen::Vector2d& xi) {
  if (n == 0) {
    if (kind == Parity::Sin) throw std::domain_error("harmonic_Q: Q^s_0 is undefined");
    return Eigen::Vector2d::Zero();
  }
  // d1 Q^c_n = n Q^c_{n-1}, d2 Q^c_n = -n Q^s_{n-1}; d1 Q^s_n = n Q^s_{n-1}, d2 Q^s_n = n Q^c_{n-1}
  const double qc = harmonic_Q(n - 1, Parity::Cos, xi);
  const double qs = n - 1 == 0 ? 0.0 : harmonic_Q(n - 1, Parity::Sin, xi);
  if (kind == Parity::Cos) return {n * qc, -n * qs};
  return {n * qs, n * qc};
}

}  // namespace vortexlab
