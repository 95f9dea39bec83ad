#include "vortexlab/ns_solver.hpp"

#include <doctest.h>
#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace vortexlab;

namespace {

SolverConfig small_config() {
  SolverConfig cfg;
  cfg.n = 256;
  cfg.box = 8.0;
  cfg.nu = 1e-3;
  cfg.t0 = 10.0;  // sqrt(nu t0) = 0.1 = 3.2 h
  cfg.t_end = 10.5;
  cfg.output_stride = 0;
  return cfg;
}

double l1_diff(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::abs(a.values[k] - b.values[k]);
  return s * a.h() * a.h();
}

double l2_norm(const GridField& a) {
  double s = 0.0;
  for (double v : a.values) s += v * v;
  return std::sqrt(s * a.h() * a.h());
}

GridField minus(const GridField& a, const GridField& b) {
  GridField d = a;
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
  return d;
}

// max |k . u_hat| / max |u_hat| over the spectrum
double spectral_divergence(const Velocity& vel) {
  const int n = vel.u.n;
  const int nc = n / 2 + 1;
  std::vector<std::complex<double>> uh(static_cast<std::size_t>(n) * nc), vh(uh.size());
  std::vector<double> buf(vel.u.values);
  fftw_plan p = fftw_plan_dft_r2c_2d(n, n, buf.data(), reinterpret_cast<fftw_complex*>(uh.data()), FFTW_ESTIMATE);
  fftw_execute(p);
  buf = vel.v.values;
  fftw_execute_dft_r2c(p, buf.data(), reinterpret_cast<fftw_complex*>(vh.data()));
  fftw_destroy_plan(p);
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < nc; ++i) {
      const double kx = i, ky = j <= n / 2 ? j : j - n;
      const std::size_t idx = static_cast<std::size_t>(j) * nc + i;
      worst = std::max(worst, std::abs(kx * uh[idx] + ky * vh[idx]));
      scale = std::max({scale, std::abs(kx * uh[idx]), std::abs(ky * vh[idx])});
    }
  return worst / scale;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig ok = small_config();
  CHECK_NOTHROW(ok.validate());
  auto bad = [&](auto mutate) {
    SolverConfig c = small_config();
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.n = 300; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.t0 = 0.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.box = 7.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.t0 = 20.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.t_end = 1.0; }).validate(), std::invalid_argument);
  // unresolved core
  CHECK_THROWS_AS(init_oseen({{Eigen::Vector2d::Zero(), 1.0}}, bad([](SolverConfig& c) { c.t0 = 5.0; })),
                  std::invalid_argument);
}

TEST_CASE("superposed Oseen initial data") {
  const SolverConfig cfg = small_config();
  for (const Circulations& c : {Circulations{1.0, 1.0, 1.0}, Circulations{1.0, -0.5, 1.0}}) {
    const GridField w = init_superposed_oseen(c, cfg);
    CHECK(std::abs(w.mass() - c.gamma()) <= 1e-12 * std::abs(c.gamma()) + 1e-14);
    CHECK(w.moment().norm() <= 1e-10);
  }
  // a single vortex at the box center is symmetric under the lattice reflections
  const GridField s = init_oseen({{Eigen::Vector2d::Zero(), 1.0}}, cfg);
  const int n = s.n;
  double asym = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      asym = std::max(asym, std::abs(s.at(i, j) - s.at(j, i)));
      asym = std::max(asym, std::abs(s.at(i, j) - s.at((n - i) % n, j)));
    }
  CHECK(asym <= 1e-14 * s.max_abs());
}

TEST_CASE("Biot-Savart velocity") {
  const SolverConfig cfg = small_config();
  const GridField w = init_oseen({{Eigen::Vector2d::Zero(), 1.0}}, cfg);
  const Velocity vel = biot_savart_velocity(w);
  // azimuthal speed along the positive x axis; the mean-free projection adds the solid-body
  // term -Gamma rho / (2 L^2)
  const double s2 = cfg.nu * cfg.t0, L = cfg.box;
  double worst = 0.0;
  for (int i = w.n / 2 + 1; w.coord(i) <= L / 8.0; ++i) {
    const double rho = w.coord(i);
    const double swirl = 2.0 * kPi * rho * vel.v.at(i, w.n / 2);
    const double exact = 1.0 - std::exp(-rho * rho / (4.0 * s2)) - kPi * rho * rho / (L * L);
    worst = std::max(worst, std::abs(swirl - exact) / std::abs(exact));
    CHECK(std::abs(vel.u.at(i, w.n / 2)) <= 1e-12);
  }
  CHECK(worst <= 1e-3);
  CHECK(spectral_divergence(vel) <= 1e-13);

  // antipodal pair: u(-x) = -u(x)
  const GridField p = init_superposed_oseen({1.0, 1.0, 1.0}, cfg);
  const Velocity pv = biot_savart_velocity(p);
  const int n = p.n;
  double asym = 0.0, umax = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int ri = (n - i) % n, rj = (n - j) % n;
      asym = std::max({asym, std::abs(pv.u.at(i, j) + pv.u.at(ri, rj)), std::abs(pv.v.at(i, j) + pv.v.at(ri, rj))});
      umax = std::max(umax, std::abs(pv.u.at(i, j)));
    }
  CHECK(asym <= 1e-10 * umax);
}

TEST_CASE("pure diffusion is exact") {
  SolverConfig cfg = small_config();
  const GridField w0 = init_oseen({{Eigen::Vector2d(0.3, -0.2), 1.0}}, cfg);
  SpectralSolver s(cfg.n, cfg.box, cfg.nu, cfg.dealias, false);
  s.load(w0);
  const double dt = 0.25;
  for (int k = 1; k <= 4; ++k) {
    s.step(dt);
    SolverConfig at = cfg;
    at.t0 = cfg.t0 + k * dt;
    const GridField exact = init_oseen({{Eigen::Vector2d(0.3, -0.2), 1.0}}, at);
    CHECK(l2_norm(minus(s.field(), exact)) <= 1e-10 * k * l2_norm(exact));
  }
}

TEST_CASE("single Oseen vortex stays self-similar") {
  SolverConfig cfg = small_config();
  cfg.nu = 2.5e-3;
  cfg.t0 = 4.0;
  cfg.t_end = 16.0;
  const GridField w0 = init_oseen({{Eigen::Vector2d::Zero(), 1.0}}, cfg);
  double worst = 0.0;
  run_solver(w0, cfg, [&](const GridField& w, long) {
    SolverConfig at = cfg;
    at.t0 = w.time;
    worst = std::max(worst, l1_diff(w, init_oseen({{Eigen::Vector2d::Zero(), 1.0}}, at)));
  });
  CHECK(worst <= 1e-3);
}

TEST_CASE("mass, mean and symmetry over steps") {
  const SolverConfig cfg = small_config();
  const GridField w0 = init_superposed_oseen({1.0, 1.0, 1.0}, cfg);
  SpectralSolver s(cfg.n, cfg.box, cfg.nu, cfg.dealias);
  s.load(w0);
  for (int k = 0; k < 100; ++k) s.step_cfl(cfg.cfl, 0.0);
  const GridField w = s.field();
  CHECK(std::abs(w.mass() - w0.mass()) <= 1e-13 * std::abs(w0.mass()));
  CHECK(w.moment().norm() <= 1e-6);
  const int n = w.n;
  double asym = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) asym = std::max(asym, std::abs(w.at(i, j) - w.at((n - i) % n, (n - j) % n)));
  CHECK(asym <= 1e-10 * w.max_abs());
}

TEST_CASE("co-rotation follows the sign of the total circulation") {
  SolverConfig cfg = small_config();
  cfg.t_end = 12.0;
  for (double g : {1.0, -1.0}) {
    const GridField w0 = init_superposed_oseen({g, g, 1.0}, cfg);
    const GridField w = run_solver(w0, cfg, nullptr);
    // vorticity-weighted height of the vortex on the right half
    double m = 0.0, my = 0.0;
    for (int j = 0; j < w.n; ++j)
      for (int i = w.n / 2; i < w.n; ++i) {
        m += w.at(i, j);
        my += w.at(i, j) * w.coord(j);
      }
    CHECK(my / m * g > 0.0);
  }
}

TEST_CASE("runs are deterministic") {
  SolverConfig cfg = small_config();
  cfg.output_stride = 5;
  auto go = [&] {
    std::vector<double> trace;
    const GridField w = run_solver(init_superposed_oseen({1.0, 0.5, 1.0}, cfg), cfg,
                                   [&](const GridField& f, long) { trace.push_back(f.values[f.values.size() / 3]); });
    trace.insert(trace.end(), w.values.begin(), w.values.end());
    return trace;
  };
  const auto a = go(), b = go();
  CHECK(a == b);
}

TEST_CASE("output times are hit exactly") {
  SolverConfig cfg = small_config();
  cfg.output_times = {10.123, 10.4};
  std::vector<double> t;
  RunStats st;
  run_solver(init_superposed_oseen({1.0, 1.0, 1.0}, cfg), cfg, [&](const GridField& f, long) { t.push_back(f.time); },
             &st);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == cfg.t0);
  CHECK(t[1] == cfg.output_times[0]);
  CHECK(t[2] == cfg.output_times[1]);
  CHECK(t[3] == cfg.t_end);
  CHECK(st.steps > 0);
  // the monitor warns above 1e-10 of the energy in the last octave
  CHECK(st.max_tail_fraction > 0.0);
  CHECK((st.max_tail_fraction > 1e-10) == !st.warnings.empty());
}

TEST_CASE("checkpoint round trip") {
  const SolverConfig cfg = small_config();
  GridField w = init_superposed_oseen({1.0, -0.5, 1.0}, cfg);
  w.time = 10.25;
  const auto path = (std::filesystem::temp_directory_path() / "vortexlab_checkpoint_test.bin").string();
  write_checkpoint(w, path);
  CHECK(std::filesystem::file_size(path) == w.values.size() * sizeof(double));
  const GridField r = read_checkpoint(path);
  CHECK(r.n == w.n);
  CHECK(r.box == w.box);
  CHECK(r.time == w.time);
  CHECK(r.nu == w.nu);
  CHECK(r.values == w.values);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
  CHECK_THROWS(read_checkpoint(path));
}

TEST_CASE("time convergence is fourth order") {
  SolverConfig cfg = small_config();
  cfg.n = 128;
  cfg.nu = 0.01;
  cfg.t0 = 4.0;  // sqrt(nu t0) = 0.2 = 3.2 h
  const GridField w0 = init_oseen({{Eigen::Vector2d(0.4, 0.0), 1.0}, {Eigen::Vector2d(-0.6, 0.0), 0.5}}, cfg);
  auto run = [&](double dt) {
    SpectralSolver s(cfg.n, cfg.box, cfg.nu);
    s.load(w0);
    const int steps = static_cast<int>(std::lround(2.0 / dt));
    for (int k = 0; k < steps; ++k) s.step(dt);
    return s.field();
  };
  const GridField a = run(0.2), b = run(0.1), c = run(0.05);
  const double r = l2_norm(minus(a, b)) / l2_norm(minus(b, c));
  INFO("ratio " << r);
  CHECK(r == doctest::Approx(16.0).epsilon(0.3));
}

TEST_CASE("spectral convergence in n") {
  // an unequal close pair strains its cores into finer structure
  auto run = [](int n) {
    SolverConfig cfg;
    cfg.n = n;
    cfg.box = 8.0;
    cfg.nu = 0.02;
    cfg.t0 = 8.0;  // sqrt(nu t0) = 0.4 = 3.2 h at n = 64
    const GridField w0 = init_oseen({{Eigen::Vector2d(0.25, 0.0), 1.0}, {Eigen::Vector2d(-0.35, 0.0), 0.4}}, cfg);
    SpectralSolver s(n, cfg.box, cfg.nu);
    s.load(w0);
    for (int k = 0; k < 150; ++k) s.step(0.02);
    return s.field();
  };
  const GridField a = run(64), b = run(128), c = run(256);
  // compare on the common coarse nodes
  auto diff = [](const GridField& coarse, const GridField& fine) {
    const int f = fine.n / coarse.n;
    double s = 0.0;
    for (int j = 0; j < coarse.n; ++j)
      for (int i = 0; i < coarse.n; ++i) s += std::abs(coarse.at(i, j) - fine.at(f * i, f * j));
    return s * coarse.h() * coarse.h();
  };
  const double d1 = diff(a, b), d2 = diff(b, c);
  INFO("differences " << d1 << " " << d2);
  // past saturation both differences sit at round-off
  CHECK((d1 >= 10.0 * d2 || d1 <= 1e-11));
}
