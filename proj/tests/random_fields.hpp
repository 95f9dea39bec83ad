#pragma once

#include "vortexlab/mode_operators.hpp"

#include <random>

namespace vortexlab::testing {

// rho^n (c0 + c1 rho^2 + c2 rho^4) e^{-rho^2 / 4 s} on random modes n <= max_mode; s in [0.8, 1]
// keeps the Y-norm finite.
inline ModeField random_field(std::mt19937& rng, const GridPtr& g, int max_mode, int n_entries = 3,
                              bool allow_radial = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), width(0.8, 1.0);
  std::uniform_int_distribution<int> mode(allow_radial ? 0 : 1, max_mode);
  ModeField f(g);
  for (int k = 0; k < n_entries; ++k) {
    const int n = mode(rng);
    const Parity p = (n == 0 || u(rng) > 0.0) ? Parity::Cos : Parity::Sin;
    const double c0 = u(rng), c1 = 0.3 * u(rng), c2 = 0.02 * u(rng), s = width(rng);
    f.add(n, p, sample(g, [=](double r) {
            return std::pow(r, n) * (c0 + c1 * r * r + c2 * r * r * r * r) * std::exp(-r * r / (4.0 * s));
          }));
  }
  return f;
}

// Polynomial of degree <= deg in the plane, stored by modes: sum over n of rho^{n + 2j} (cos|sin) n theta.
inline ModeField random_polynomial(std::mt19937& rng, const GridPtr& g, int deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModeField f(g);
  for (int n = 0; n <= deg; ++n)
    for (int j = 0; n + 2 * j <= deg; ++j) {
      const int e = n + 2 * j;
      f.add(n, Parity::Cos, sample(g, [=](double r) { return std::pow(r, e); }), u(rng), nullptr,
            DecayClass::Polynomial);
      if (n > 0)
        f.add(n, Parity::Sin, sample(g, [=](double r) { return std::pow(r, e); }), u(rng), nullptr,
              DecayClass::Polynomial);
    }
  return f;
}

inline double max_abs_on(const ModeField& f, double rho_lo, double rho_hi) {
  double m = 0.0;
  const GridPtr& g = f.grid();
  for (const auto& [k, p] : f.entries())
    for (int i = 0; i < g->size(); ++i)
      if (g->node(i) >= rho_lo && g->node(i) <= rho_hi) m = std::max(m, std::abs(p.values(i)));
  return m;
}

}  // namespace vortexlab::testing
