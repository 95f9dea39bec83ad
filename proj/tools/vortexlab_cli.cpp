#include "vortexlab/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace vortexlab;
using nlohmann::json;

namespace {

// exit codes
constexpr int kOk = 0, kValidation = 1, kConfig = 2;

std::string sidecar(const std::string& csv) { return csv + ".json"; }

int cmd_expand(double g1, double g2, double d, int order, int radial_n, double radial_max, int stride,
               const std::string& out) {
  Circulations c{g1, g2, d};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (order < 1 || order > 12) throw ConfigError("order must lie in 1..12");
  for (const auto& w : c.validity_warnings()) std::cerr << "warning: " << w << '\n';
  const EpsilonSeries s = construct_approximation(c, order, RadialGrid::make(radial_n, radial_max));
  json j = series_to_json(s, stride);
  write_json(out, j);
  const auto& b = j["beta"]["normalized"];
  std::printf("order %d written to %s\n", order, out.c_str());
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b[k].get<double>() != 0.0 && std::abs(b[k].get<double>()) > 1e-9) std::printf("beta_%zu = %.10g\n", k, b[k].get<double>());
  std::printf("beta_4 closed form = %.10g\n", j["beta"]["beta4_closed_form"].get<double>());
  return kOk;
}

int cmd_simulate(const std::string& config, std::string out) {
  std::string cfg_out;
  const ExperimentConfig cfg = config_from_json(read_json(config), &cfg_out);
  if (out.empty()) out = cfg_out;
  if (out.empty()) throw ConfigError("no output path: give --out or the config key 'out'");
  const PairTrajectory tr = run_experiment(cfg);
  write_trajectory_csv(out, tr.records);
  json meta = config_to_json(cfg, out);
  meta["schema"] = "vortexlab.trajectory/1";
  meta["columns"] = kTrajectoryColumns;
  meta["warnings"] = tr.warnings;
  if (!tr.tracking_lost.empty()) meta["tracking_lost_at"] = tr.lost_at;
  meta["steps"] = tr.stats.steps;
  meta["min_dt"] = tr.stats.min_dt;
  meta["max_dt"] = tr.stats.max_dt;
  meta["max_tail_fraction"] = tr.stats.max_tail_fraction;
  write_json(sidecar(out), meta);
  for (const auto& w : tr.warnings) std::cerr << "warning: " << w << '\n';
  std::printf("%zu records, %ld steps written to %s\n", tr.records.size(), tr.stats.steps, out.c_str());
  // a partial trajectory is still written, but the run did not reach t_end
  return tr.tracking_lost.empty() ? kOk : kValidation;
}

int cmd_compare(const std::string& run, const std::string& coeffs, const std::string& out, bool strict) {
  const auto records = read_trajectory_csv(run);
  const json meta = read_json(sidecar(run));
  const SeriesSummary ss = read_series_summary(read_json(coeffs));
  ExperimentConfig cfg = config_from_json([&] {
    json m = meta;
    for (const char* k : {"schema", "columns", "warnings", "steps", "min_dt", "max_dt", "max_tail_fraction", "tracking_lost_at"}) m.erase(k);
    return m;
  }());
  if (std::abs(cfg.circ.gamma1 - ss.circ.gamma1) > 1e-12 || std::abs(cfg.circ.gamma2 - ss.circ.gamma2) > 1e-12 ||
      std::abs(cfg.circ.d - ss.circ.d) > 1e-12)
    throw ConfigError("run and coefficient file disagree on the circulations");
  if (records.size() < 3) throw ConfigError("run has fewer than 3 records");
  AnalysisOptions opt;
  opt.t0 = cfg.solver.t0;
  opt.beta4 = ss.beta_normalized.size() > 4 ? ss.beta_normalized[4] : ss.beta4_closed_form;
  opt.rate_factor = cfg.torus_correction ? torus_rate_factor(cfg.circ.d, cfg.solver.box) : 1.0;
  opt.drift_t_hi = std::min(20.0 * cfg.solver.t0, records.back().t);
  const PairAnalysis a = analyze_pair(records, cfg.circ, cfg.solver.nu, opt);
  json rep;
  rep["schema"] = "vortexlab.compare_report/1";
  rep["run"] = run;
  rep["coeffs"] = coeffs;
  rep["l1"] = {{"slope", a.l1_slope}, {"rel_residual", a.l1_rel_residual}, {"tolerance", opt.l1_tol}, {"pass", a.l1_pass}};
  rep["drift"] = {{"t_lo", a.t_lo},
                  {"t_hi", a.t_hi},
                  {"points", a.drift_points},
                  {"exponent", a.drift_exponent},
                  {"exponent_pass", a.exponent_pass},
                  {"coefficient", a.drift_coefficient},
                  {"predicted_coefficient", a.predicted_coefficient},
                  {"coefficient_rel_error", a.coefficient_rel_error},
                  {"coefficient_pass", a.coefficient_pass},
                  {"sign", a.drift_sign},
                  {"predicted_sign", a.predicted_sign},
                  {"sign_pass", a.sign_pass}};
  rep["beta4"] = opt.beta4;
  rep["rate_factor"] = opt.rate_factor;
  const bool all = a.l1_pass && a.exponent_pass && a.coefficient_pass && a.sign_pass;
  rep["pass"] = all;
  write_json(out, rep);
  std::printf("l1 %s (rel residual %.3g), exponent %s (%.3f), coefficient %s (rel err %.3g), sign %s\n",
              a.l1_pass ? "pass" : "FAIL", a.l1_rel_residual, a.exponent_pass ? "pass" : "FAIL", a.drift_exponent,
              a.coefficient_pass ? "pass" : "FAIL", a.coefficient_rel_error, a.sign_pass ? "pass" : "FAIL");
  return strict && !all ? kValidation : kOk;
}

int cmd_invariants_run(const std::string& run, double mass_tol, double moment_tol) {
  const auto records = read_trajectory_csv(run);
  if (records.empty()) throw ConfigError("run has no records");
  double dm = 0.0, mm = 0.0;
  for (const auto& r : records) {
    dm = std::max(dm, std::abs(r.mass - records.front().mass));
    mm = std::max(mm, r.moment.norm());
  }
  const double scale = std::max(std::abs(records.front().mass), 1e-300);
  const bool ok = dm <= mass_tol * scale && mm <= moment_tol;
  std::printf("mass deviation %.3e (tol %.1e |Gamma|), moment %.3e (tol %.1e): %s\n", dm, mass_tol, mm, moment_tol,
              ok ? "pass" : "FAIL");
  return ok ? kOk : kValidation;
}

int cmd_invariants_points(double g1, double g2, double d, double periods, double tol) {
  Circulations c{g1, g2, d};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const double period = 4.0 * kPi * kPi * d * d / std::abs(c.gamma());
  const std::vector<double> gam = {g1, g2};
  const Points z0 = {Eigen::Vector2d(c.ell(0), 0.0), Eigen::Vector2d(c.ell(1), 0.0)};
  NBodyOptions opt;
  opt.tol = 1e-12;
  const NBodyTrajectory tr = integrate_n_body(z0, gam, periods * period, opt);
  const double h0 = kirchhoff_hamiltonian(z0, gam), a0 = angular_impulse(z0, gam);
  const Eigen::Vector2d p0 = linear_impulse(z0, gam);
  double eh = 0.0, ea = 0.0, ep = 0.0, ez = 0.0;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    eh = std::max(eh, std::abs(kirchhoff_hamiltonian(tr.z[k], gam) - h0));
    ea = std::max(ea, std::abs(angular_impulse(tr.z[k], gam) - a0));
    ep = std::max(ep, (linear_impulse(tr.z[k], gam) - p0).norm());
    const PairState ex = two_vortex_exact(c, tr.t[k]);
    ez = std::max({ez, (tr.z[k][0] - ex.x1).norm(), (tr.z[k][1] - ex.x2).norm()});
  }
  const bool ok = eh <= tol && ea <= tol && ep <= tol && ez <= tol;
  std::printf("%zu steps over %.3g periods: position error %.3e, hamiltonian %.3e, impulse %.3e, angular %.3e: %s\n",
              tr.t.size() - 1, periods, ez, eh, ep, ea, ok ? "pass" : "FAIL");
  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortex pair asymptotics and spectral experiments"};
  app.require_subcommand(1);

  double g1 = 1.0, g2 = 1.0, d = 1.0;
  int order = 6, radial_n = 2048, stride = 8;
  double radial_max = 24.0;
  std::string out;
  auto* expand = app.add_subcommand("expand", "construct the epsilon series and write it as JSON");
  expand->add_option("--gamma1", g1, "circulation of vortex 1");
  expand->add_option("--gamma2", g2, "circulation of vortex 2");
  expand->add_option("--d", d, "initial separation");
  expand->add_option("--order", order, "expansion order M")->check(CLI::Range(1, 12));
  expand->add_option("--radial-n", radial_n, "radial nodes")->check(CLI::Range(64, 1 << 16));
  expand->add_option("--radial-max", radial_max, "radial domain size")->check(CLI::PositiveNumber);
  expand->add_option("--stride", stride, "keep every stride-th radial sample")->check(CLI::PositiveNumber);
  expand->add_option("--out", out, "output JSON")->required();

  std::string config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "run the spectral solver with diagnostics");
  simulate->add_option("--config", config, "run configuration JSON")->required();
  simulate->add_option("--out", sim_out, "trajectory CSV (overrides the config)");

  std::string run, coeffs, report;
  bool strict = false;
  auto* compare = app.add_subcommand("compare", "compare a run with the asymptotic prediction");
  compare->add_option("--run", run, "trajectory CSV")->required();
  compare->add_option("--coeffs", coeffs, "series JSON from expand")->required();
  compare->add_option("--out", report, "report JSON")->required();
  compare->add_flag("--strict", strict, "exit 1 when any check fails");

  std::string inv_run;
  double periods = 10.0, tol = 1e-8, mass_tol = 1e-12, moment_tol = 1e-6;
  double ig1 = 1.0, ig2 = 1.0, id = 1.0;
  auto* inv = app.add_subcommand("invariants", "check conservation laws of a run, or of the point-vortex pair");
  inv->add_option("--run", inv_run, "trajectory CSV; without it the point-vortex integrator is checked");
  inv->add_option("--mass-tol", mass_tol, "relative mass tolerance");
  inv->add_option("--moment-tol", moment_tol, "first-moment tolerance");
  inv->add_option("--gamma1", ig1, "circulation of vortex 1 (point-vortex check)");
  inv->add_option("--gamma2", ig2, "circulation of vortex 2 (point-vortex check)");
  inv->add_option("--d", id, "separation (point-vortex check)");
  inv->add_option("--periods", periods, "integration length in rotation periods")->check(CLI::PositiveNumber);
  inv->add_option("--tol", tol, "integrator tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (expand->parsed()) return cmd_expand(g1, g2, d, order, radial_n, radial_max, stride, out);
    if (simulate->parsed()) return cmd_simulate(config, sim_out);
    if (compare->parsed()) return cmd_compare(run, coeffs, report, strict);
    if (inv->parsed()) {
      if (!inv_run.empty()) return cmd_invariants_run(inv_run, mass_tol, moment_tol);
      return cmd_invariants_points(ig1, ig2, id, periods, tol);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kConfig;
}
