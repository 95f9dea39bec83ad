#pragma once

#include "vortexlab/ns_solver.hpp"
#include "vortexlab/pseudo_momenta.hpp"
#include "vortexlab/trajectories.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CenterOptions {
  double radius = 0.4;          // disk radius in units of d
  double tol = 1e-10;           // movement tolerance in units of d
  int max_iter = 50;
};

// Fixed-point iteration of the vorticity centroid over a disk around each guess, with the weight
// sign-matched to the circulation. Cells straddling the disk edge get fractional weight.
std::array<Eigen::Vector2d, 2> extract_centers(const GridField& w, const std::array<Eigen::Vector2d, 2>& guesses,
                                               const Circulations& c, const CenterOptions& opt = {});
Eigen::Vector2d extract_center(const GridField& w, const Eigen::Vector2d& guess, double gamma, double d = 1.0,
                               const CenterOptions& opt = {});

// int |w - sum_i gamma_i/(4 pi nu t) exp(-|x - x_i|^2 / 4 nu t)| dx on the grid (minimum-image distances).
double l1_error(const GridField& w, const Circulations& c, const std::array<Eigen::Vector2d, 2>& centers, double t,
                double nu);

struct ViewOptions {
  int max_mode = 8;
  int angles = 64;
  // samples with |xi| above this are set to zero (also capped at the box half width)
  double rho_limit = 1e300;
};
// Omega(xi) = nu t w(center + sqrt(nu t) R(theta) xi) projected on angular modes. Sampling uses
// local bicubic (4x4 Lagrange) interpolation.
ModeField self_similar_view(const GridField& w, const Eigen::Vector2d& center, double theta, double t, double nu,
                            const GridPtr& grid, const ViewOptions& opt = {});
// Bicubic sample of the periodic grid field.
double sample_bicubic(const GridField& w, double x, double y);

struct PhaseSeries {
  std::vector<double> theta;  // unwrapped
  std::vector<double> drift;  // theta - rate_factor * Gamma t / (2 pi d^2)
};
// Angle of center 1, unwrapped; throws std::invalid_argument for fewer than 3 samples.
PhaseSeries measure_phase(const std::vector<double>& t, const std::vector<Eigen::Vector2d>& center1,
                          const Circulations& c, double rate_factor = 1.0);

// Relative rotation rate of a pair on the mean-free torus: 1 - pi d^2 / L^2.
double torus_rate_factor(double d, double box);

// 1/2 (int w^2 W0 + <Delta^{-1} w, w>) over |xi| <= radius_limit.
double energy_W0(const ModeField& w, double radius_limit = 1e300);
double energy_W0(const VectorModeField& w, double radius_limit = 1e300);

// Y-norm restricted to |xi| <= radius_limit.
double norm_Y_limited(const ModeField& w, double radius_limit);
double norm_Y_limited(const VectorModeField& w, double radius_limit);

// Least-squares fits.
struct LineFit {
  double slope = 0.0, intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// slope through the origin
LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);
// y = C x^p by log-log regression on |y|; C carries the common sign, also reported in `sign`
struct PowerFit {
  double exponent = 0.0, coefficient = 0.0;
  int sign = 0;
};
PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y);
// best C in y = C x^p for fixed p
double fit_coefficient(const std::vector<double>& x, const std::vector<double>& y, double p);
// y = C (x^p - x0^p) with p searched on [p_lo, p_hi] and C by least squares
struct OffsetPowerFit {
  double exponent = 0.0, coefficient = 0.0;
  double rms_residual = 0.0;
};
OffsetPowerFit fit_power_offset(const std::vector<double>& x, const std::vector<double>& y, double x0,
                                double p_lo = 1.0, double p_hi = 6.0);

struct PairRecord {
  double t = 0.0, eps = 0.0;
  Eigen::Vector2d x1 = Eigen::Vector2d::Zero(), x2 = Eigen::Vector2d::Zero();
  double theta_measured = 0.0, theta_predicted = 0.0;
  double l1_error = 0.0;
  double mass = 0.0;
  Eigen::Vector2d moment = Eigen::Vector2d::Zero();
  double mu_o = 0.0, mu_e = 0.0;
  double energy_w0 = 0.0;
  double perturbation_norm = 0.0;  // Y-norm of the projected remainder (limited radius)
};

struct PairTrajectory {
  std::vector<PairRecord> records;
  std::vector<std::string> warnings;
  RunStats stats;
  // set when center extraction failed; the run stops there and records end before it
  std::string tracking_lost;
  double lost_at = 0.0;
};

struct ExperimentConfig {
  Circulations circ{1.0, 1.0, 1.0};
  SolverConfig solver;
  int order = 6;
  int radial_n = 2048;
  double radial_max = 24.0;
  bool probes = true;            // pseudo-momenta projection and W0 energy per record
  bool torus_correction = true;  // predicted phase uses torus_rate_factor
  unsigned seed = 1;
  std::string checkpoint;        // final field written here when non-empty
};

// Builds the series, runs the solver and evaluates every diagnostic at each record. An extraction
// failure, or the two centers closing within the extraction radius (merger), ends the run early
// (tracking_lost); the checkpoint then holds the field at that time.
PairTrajectory run_experiment(const ExperimentConfig& cfg, EpsilonSeries* series_out = nullptr);

// Perturbation of the measured field against the approximate solution at one record: the view of
// vortex i minus the partner's approximate profile, minus the approximate core.
struct Perturbation {
  VectorModeField omega;
  double rho_limit = 0.0;
};
Perturbation measure_perturbation(const GridField& w, const EpsilonSeries& s, const std::array<Eigen::Vector2d, 2>& centers,
                                  double theta, double t, double nu, const ViewOptions& opt = {});

// Run-level comparison against the asymptotic prediction.
struct AnalysisOptions {
  double t0 = 0.0;           // start of the run (phase reference)
  double beta4 = 0.0;        // normalized beta_4
  double rate_factor = 1.0;  // torus correction of the point-vortex rate
  double drift_t_lo = 0.0;   // drift fit window; 0 means [2 t0, 20 t0]
  double drift_t_hi = 0.0;
  double l1_tol = 0.15;      // linear-fit residual relative to the terminal error
  double exponent_tol = 0.3;
  double coefficient_tol = 0.25;
};
struct PairAnalysis {
  double l1_slope = 0.0;         // per unit nu t / d^2, fit through the origin
  double l1_rel_residual = 0.0;  // max |residual| / terminal error
  double drift_exponent = 0.0;
  double drift_coefficient = 0.0, predicted_coefficient = 0.0;
  double coefficient_rel_error = 0.0;
  int drift_sign = 0, predicted_sign = 0;
  double t_lo = 0.0, t_hi = 0.0;
  int drift_points = 0;
  bool l1_pass = false, exponent_pass = false, coefficient_pass = false, sign_pass = false;
};
// Drift is theta_measured - rate_factor Gamma (t - t0) / (2 pi d^2), fitted as C (t^p - t0^p); the
// prediction is C = (Gamma / 2 pi d^2) beta4 nu^2 / (3 d^4).
PairAnalysis analyze_pair(const std::vector<PairRecord>& records, const Circulations& c, double nu,
                          const AnalysisOptions& opt);

}  // namespace vortexlab
