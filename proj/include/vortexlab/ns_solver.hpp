#pragma once

#include "vortexlab/asymptotics.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vortexlab {

// Vorticity samples on a doubly periodic box [-L/2, L/2)^2, row-major with index j * n + i,
// x = -L/2 + i h, y = -L/2 + j h.
struct GridField {
  int n = 0;
  double box = 0.0;
  double time = 0.0;
  double nu = 0.0;
  std::vector<double> values;

  GridField() = default;
  GridField(int n_, double box_) : n(n_), box(box_), values(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double h() const { return box / n; }
  double coord(int i) const { return -0.5 * box + i * h(); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }

  double mass() const;
  // first moments about the box center
  Eigen::Vector2d moment() const;
  double max_abs() const;
  // bilinear interpolation at a physical point, periodically wrapped
  double sample(double x, double y) const;
};

struct SolverConfig {
  int n = 512;
  double box = 16.0;
  double nu = 1e-3;
  double t0 = 2.5;
  double t_end = 50.0;
  double cfl = 0.5;
  double dealias = 2.0 / 3.0;
  int output_stride = 50;      // 0 disables stride output
  std::vector<double> output_times;  // exact output times (the step is shortened to hit them)
  double dt_max = 0.0;         // 0 = no cap beyond the CFL limit
  bool advect = true;          // false gives the pure heat equation

  // Throws std::invalid_argument on n not a power of two, t0 <= 0, box < 8 d, eps0 > 0.1, etc.
  void validate(double d = 1.0) const;
};

struct OseenSpec {
  Eigen::Vector2d center;
  double gamma;
};

// Periodized Gaussians gamma/(4 pi nu t0) exp(-|x - c|^2 / 4 nu t0). Throws std::invalid_argument
// when sqrt(nu t0) < 3 h.
GridField init_oseen(const std::vector<OseenSpec>& vortices, const SolverConfig& cfg);
// The pair with centers (ell_1, 0), (ell_2, 0) about the box center.
GridField init_superposed_oseen(const Circulations& c, const SolverConfig& cfg);

struct Velocity {
  GridField u, v;
};
Velocity biot_savart_velocity(const GridField& w);

// Spectral energy fraction in the last octave below the dealiasing cutoff.
double spectral_tail_fraction(const GridField& w, double dealias = 2.0 / 3.0);

class SpectralSolver {
 public:
  SpectralSolver(int n, double box, double nu, double dealias = 2.0 / 3.0, bool advect = true);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  void load(const GridField& w);
  GridField field() const;
  double time() const { return time_; }

  // One integrating-factor RK4 step. Throws std::runtime_error on non-finite values.
  void step(double dt);
  // Step with dt = min(cfl h / max|u|, limit); returns the dt taken.
  double step_cfl(double cfl, double limit);
  double max_velocity();
  long steps() const { return steps_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double time_ = 0.0;
  long steps_ = 0;
};

struct RunStats {
  long steps = 0;
  double min_dt = 0.0, max_dt = 0.0;
  double max_tail_fraction = 0.0;
  std::vector<std::string> warnings;
};

// Steps from t0 to t_end, calling probe at t0, every output_stride steps, at each output time
// and at t_end.
using Probe = std::function<void(const GridField&, long step)>;
GridField run_solver(const GridField& initial, const SolverConfig& cfg, const Probe& probe, RunStats* stats = nullptr);

// Raw little-endian float64 samples plus a JSON sidecar (path + ".json").
void write_checkpoint(const GridField& w, const std::string& path);
GridField read_checkpoint(const std::string& path);

}  // namespace vortexlab
