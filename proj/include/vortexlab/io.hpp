#pragma once

#include "vortexlab/harness.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

// Bad or missing configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Series with beta table; radial samples every `stride` nodes.
nlohmann::json series_to_json(const EpsilonSeries& s, int stride = 8);
nlohmann::json pseudo_momenta_to_json(const PseudoMomentaSet& p, int stride = 8);
nlohmann::json mode_field_to_json(const ModeField& f, int stride);
// Reads back the scalar tables (circulations, order, theta/alpha coefficients, beta table).
struct SeriesSummary {
  Circulations circ;
  int order = 0;
  std::vector<double> beta_normalized;
  double beta4_closed_form = 0.0;
  std::vector<double> alpha_coefficients;
};
SeriesSummary read_series_summary(const nlohmann::json& j);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Columns: t,x1x,x1y,x2x,x2y,theta,l1_err,mass,mom_x,mom_y,mu_o,mu_e,energy_w0 (17 significant digits).
extern const char* const kTrajectoryColumns;
void write_trajectory_csv(const std::string& path, const std::vector<PairRecord>& records);
std::vector<PairRecord> read_trajectory_csv(const std::string& path);

// Keys: gamma2, nu, order, n, box, t0, t_end, cfl, output_stride, out; optional output_times,
// probes, torus_correction, checkpoint, seed, radial_n, radial_max, d.
ExperimentConfig config_from_json(const nlohmann::json& j, std::string* out_path = nullptr);
nlohmann::json config_to_json(const ExperimentConfig& cfg, const std::string& out_path = "");

}  // namespace vortexlab
