#include "vortexlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vortexlab {

using nlohmann::json;

namespace {

const char* parity_name(Parity p) { return p == Parity::Cos ? "cos" : "sin"; }

json circ_json(const Circulations& c) { return {{"gamma1", c.gamma1}, {"gamma2", c.gamma2}, {"d", c.d}}; }

json vector_field_json(const VectorModeField& f, int stride) {
  return json::array({mode_field_to_json(f[0], stride), mode_field_to_json(f[1], stride)});
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

json mode_field_to_json(const ModeField& f, int stride) {
  json modes = json::array();
  for (const auto& [k, p] : f.entries()) {
    std::vector<double> v;
    for (int i = 0; i < p.values.size(); i += stride) v.push_back(p.values(i));
    modes.push_back({{"n", k.n}, {"parity", parity_name(k.parity)}, {"values", v}});
  }
  return modes;
}

json series_to_json(const EpsilonSeries& s, int stride) {
  if (stride < 1) throw std::invalid_argument("series_to_json: stride must be >= 1");
  json j;
  j["schema"] = EpsilonSeries::kSchema;
  j["circulations"] = circ_json(s.circ);
  j["order"] = s.order;
  std::vector<double> rho;
  for (int i = 0; i < s.grid->size(); i += stride) rho.push_back(s.grid->node(i));
  j["grid"] = {{"n", s.grid->size()}, {"rho_max", s.grid->rho_max()}, {"grading", s.grid->grading()},
               {"stride", stride}, {"rho", rho}};
  j["theta_dot_euler"] = s.theta_dot_euler;
  j["theta_dot_viscous"] = s.theta_dot_viscous;
  j["alpha_dot_viscous"] = s.alpha_dot_viscous;
  j["alpha_coefficients"] = s.alpha_coefficients();
  const BetaTable b = beta_coefficients(s);
  j["beta"] = {{"normalized", b.normalized},
               {"raw", b.raw},
               {"viscous_raw", b.viscous_raw},
               {"profile_integral", b.profile_integral},
               {"angular_form", b.angular_form},
               {"integral_form", b.integral_form},
               {"beta4_closed_form", b.beta4_closed_form},
               {"conventions",
                {{"normalized", "theta_phys' = (Gamma/2pi)(1 + sum beta_k (nu t)^(k/2) / d^k)"},
                 {"raw", "-theta_dot_euler[k], differs from normalized by 2pi/Gamma"}}},
               {"warnings", b.warnings}};
  json orders = json::array();
  for (int k = 0; k <= s.order; ++k)
    orders.push_back({{"k", k}, {"euler", vector_field_json(s.euler[k], stride)},
                      {"viscous", vector_field_json(s.viscous[k], stride)}});
  j["orders"] = orders;
  j["log"] = s.log;
  j["warnings"] = s.circ.validity_warnings();
  return j;
}

json pseudo_momenta_to_json(const PseudoMomentaSet& p, int stride) {
  json j;
  j["schema"] = EpsilonSeries::kSchema;
  j["kind"] = "pseudo_momenta";
  j["circulations"] = circ_json(p.circ);
  j["eps"] = p.eps;
  j["alpha"] = p.alpha;
  j["order"] = p.order;
  j["lambda_e_series"] = p.lambda_e_series;
  j["lambda_e"] = p.lambda_e;
  static const char* names[4] = {"te", "to", "e", "o"};
  for (int k = 0; k < 4; ++k) {
    j["rho"][names[k]] = vector_field_json(p.rho(k), stride);
    j["f"][names[k]] = vector_field_json(p.f(k), stride);
  }
  const Eigen::Matrix4d m = inner_product_matrix(p);
  json mat = json::array();
  for (int r = 0; r < 4; ++r) mat.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  j["inner_product_matrix"] = mat;
  return j;
}

SeriesSummary read_series_summary(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != EpsilonSeries::kSchema)
      throw ConfigError("series JSON: unsupported schema " + j.at("schema").get<std::string>());
    SeriesSummary s;
    const json& c = j.at("circulations");
    s.circ = {c.at("gamma1").get<double>(), c.at("gamma2").get<double>(), c.at("d").get<double>()};
    s.order = j.at("order").get<int>();
    s.beta_normalized = j.at("beta").at("normalized").get<std::vector<double>>();
    s.beta4_closed_form = j.at("beta").at("beta4_closed_form").get<double>();
    s.alpha_coefficients = j.at("alpha_coefficients").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("series JSON: ") + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  // the serializer writes shortest round-trip doubles
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

const char* const kTrajectoryColumns = "t,x1x,x1y,x2x,x2y,theta,l1_err,mass,mom_x,mom_y,mu_o,mu_e,energy_w0";

void write_trajectory_csv(const std::string& path, const std::vector<PairRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kTrajectoryColumns << '\n';
  char buf[64];
  auto put = [&](double v, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << (last ? '\n' : ',');
  };
  for (const auto& r : records) {
    put(r.t, false);
    put(r.x1(0), false);
    put(r.x1(1), false);
    put(r.x2(0), false);
    put(r.x2(1), false);
    put(r.theta_measured, false);
    put(r.l1_error, false);
    put(r.mass, false);
    put(r.moment(0), false);
    put(r.moment(1), false);
    put(r.mu_o, false);
    put(r.mu_e, false);
    put(r.energy_w0, true);
  }
}

std::vector<PairRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryColumns)
    throw ConfigError(path + ": unexpected header, want " + kTrajectoryColumns);
  std::vector<PairRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != 13) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 13 columns");
    PairRecord r;
    r.t = v[0];
    r.x1 = {v[1], v[2]};
    r.x2 = {v[3], v[4]};
    r.theta_measured = v[5];
    r.l1_error = v[6];
    r.mass = v[7];
    r.moment = {v[8], v[9]};
    r.mu_o = v[10];
    r.mu_e = v[11];
    r.energy_w0 = v[12];
    if (!out.empty() && !(r.t > out.back().t)) throw ConfigError(path + ": times must increase strictly");
    out.push_back(r);
  }
  return out;
}

ExperimentConfig config_from_json(const json& j, std::string* out_path) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const char* known[] = {"gamma1", "gamma2", "d", "nu", "order", "n", "box", "t0", "t_end", "cfl",
                                "output_stride", "out", "output_times", "probes", "torus_correction",
                                "checkpoint", "seed", "radial_n", "radial_max", "dealias"};
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* q : known) ok = ok || k == q;
    if (!ok) throw ConfigError("config: unknown key '" + k + "'");
  }
  ExperimentConfig cfg;
  cfg.circ.gamma1 = get_or(j, "gamma1", 1.0);
  cfg.circ.gamma2 = get_or(j, "gamma2", 1.0);
  cfg.circ.d = get_or(j, "d", 1.0);
  cfg.order = get_or(j, "order", cfg.order);
  cfg.radial_n = get_or(j, "radial_n", cfg.radial_n);
  cfg.radial_max = get_or(j, "radial_max", cfg.radial_max);
  cfg.probes = get_or(j, "probes", cfg.probes);
  cfg.torus_correction = get_or(j, "torus_correction", cfg.torus_correction);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.checkpoint = get_or(j, "checkpoint", std::string());
  SolverConfig& s = cfg.solver;
  s.n = get_or(j, "n", s.n);
  s.box = get_or(j, "box", s.box);
  s.nu = get_or(j, "nu", s.nu);
  s.t0 = get_or(j, "t0", s.t0);
  s.t_end = get_or(j, "t_end", s.t_end);
  s.cfl = get_or(j, "cfl", s.cfl);
  s.dealias = get_or(j, "dealias", s.dealias);
  s.output_stride = get_or(j, "output_stride", s.output_stride);
  s.output_times = get_or(j, "output_times", std::vector<double>());
  if (out_path) *out_path = get_or(j, "out", std::string());
  if (cfg.order < 1 || cfg.order > 12) throw ConfigError("config: order must lie in 1..12");
  if (cfg.probes && cfg.order < 2) throw ConfigError("config: probes need order >= 2");
  try {
    cfg.circ.validate();
    s.validate(cfg.circ.d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg, const std::string& out_path) {
  json j = {{"gamma1", cfg.circ.gamma1},
            {"gamma2", cfg.circ.gamma2},
            {"d", cfg.circ.d},
            {"nu", cfg.solver.nu},
            {"order", cfg.order},
            {"n", cfg.solver.n},
            {"box", cfg.solver.box},
            {"t0", cfg.solver.t0},
            {"t_end", cfg.solver.t_end},
            {"cfl", cfg.solver.cfl},
            {"dealias", cfg.solver.dealias},
            {"output_stride", cfg.solver.output_stride},
            {"output_times", cfg.solver.output_times},
            {"probes", cfg.probes},
            {"torus_correction", cfg.torus_correction},
            {"seed", cfg.seed},
            {"radial_n", cfg.radial_n},
            {"radial_max", cfg.radial_max}};
  if (!cfg.checkpoint.empty()) j["checkpoint"] = cfg.checkpoint;
  if (!out_path.empty()) j["out"] = out_path;
  return j;
}

}  // namespace vortexlab
