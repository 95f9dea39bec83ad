#pragma once

#include "vortexlab/mode_field.hpp"

namespace vortexlab {

struct MassMoment {
  double mass = 0.0;
  Eigen::Vector2d moment = Eigen::Vector2d::Zero();
};

// m = int f, M = int xi f.
MassMoment mass_and_moment(const ModeField& f);
MassMoment mass_and_moment(const ModeField& f, double radius_limit);

// <f, g>_Y = int f g G^{-1}. Throws std::overflow_error when the product does not decay.
double inner_Y(const ModeField& f, const ModeField& g);
double norm_Y(const ModeField& f);
double norm_Y(const VectorModeField& f);
// Plain L^2 pairing int f g; the vector version sums the two components.
double inner_L2(const ModeField& f, const ModeField& g);
double inner_V(const VectorModeField& f, const VectorModeField& g);
double norm_L2(const ModeField& f);

ModeField laplacian(const ModeField& f);
ModeField apply_L(const ModeField& f);
ModeField apply_Lstar(const ModeField& f);

struct PoissonInverse {
  RadialProfile a;  // with exact derivative from the Green's representation
  bool log_branch = false;
  double log_coefficient = 0.0;  // a ~ log_coefficient * log(rho) at infinity
};
// Solves a'' + a'/rho - n^2 a / rho^2 = b, regular at 0, decaying where possible.
PoissonInverse poisson_inverse_mode(const GridPtr& g, int n, const Vec& b);
// Mode-wise inverse Laplacian; mode-0 log branches are allowed.
ModeField poisson_inverse(const ModeField& f);

// Lambda f = {Upsilon, f} + {Delta^{-1} f, G}.
ModeField apply_Lambda(const ModeField& f);

struct LambdaSolveOptions {
  // Defect-correction sweeps against the forward operator (0 = plain BVP solve).
  int refine_steps = 0;
  // Relative first-moment defect tolerated (and projected out) at n = 1.
  double moment_tol = 1e-10;
};
struct LambdaSolveReport {
  double projected_moment = 0.0;
  double final_residual = 0.0;
};

// Returns the radial factor w with the parity map b sin -> w cos, b cos -> -w sin folded in:
// for input parity Sin the result multiplies cos(n theta); for Cos it multiplies sin(n theta).
Vec invert_Lambda(const GridPtr& g, int n, const Vec& b, Parity input_parity,
                  const LambdaSolveOptions& opt = {}, LambdaSolveReport* report = nullptr);
ModeField invert_Lambda(const ModeField& b, const LambdaSolveOptions& opt = {});

// Lambda* rho = -G^{-1} Lambda[G rho], evaluated with the Gaussian factor cancelled analytically.
ModeField apply_Lambda_star(const ModeField& rho);
ModeField invert_Lambda_star(const ModeField& h, const LambdaSolveOptions& opt = {});

// Solves (kappa - L) f = r for kappa > 0, through f = G u and (kappa - L*) u = r / G.
ModeField resolvent_L(double kappa, const ModeField& r, int refine_steps = 8);

// {f, g} = rho^{-1} (d_rho f d_theta g - d_theta f d_rho g)
ModeField poisson_bracket(const ModeField& f, const ModeField& g);
VectorModeField poisson_bracket(const VectorModeField& f, const VectorModeField& g);
// d_1 (j = 1) or d_2 (j = 2) by mode shift.
ModeField derivative(const ModeField& f, int j);
// d_theta f
ModeField angular_derivative(const ModeField& f);

// Radial (mode-0) part.
ModeField project_radial(const ModeField& f);
// f - m G + M_1 d_1 G + M_2 d_2 G: removes mass and first moments.
ModeField remove_mass_and_moment(const ModeField& f, MassMoment* removed = nullptr);

// Number of cached BVP factorizations (diagnostics).
std::size_t bvp_cache_size();

}  // namespace vortexlab
