#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oscad {

/// Every knob of an experiment. Serialized as a flat JSON object with the same key names.
struct ExperimentConfig {
  // domain
  double a = -1.0, b = 1.0;
  std::string shape = "none";  // none | circle | ellipse | flower | cardioid
  double shape_cx = 0.0, shape_cy = 0.0, shape_radius = 0.2;
  std::string walls = "dirichlet";  // dirichlet | neumann
  std::string ghost_bc = "robin";   // robin | dirichlet

  // physics
  double D = 0.01;
  std::optional<double> M;  // when absent M = compute_M(delta, phi, L_cut)
  double delta = 1e-2, phi = 1.0, L_cut = 2.0;
  double epsilon = 1e-3;
  std::string time_factor = "cosine";  // cosine | constant
  std::string velocity = "radial";     // constant | poly_cubic | radial
  double A = 1.0, gamma = 0.0, u = 1.0;

  // initial condition (single Gaussian)
  double ic_x = 0.0, ic_y = 0.0, ic_sigma = 0.1;
  // manufactured solution
  double mms_x1 = 0.0, mms_y1 = 0.0, mms_x2 = 0.0, mms_y2 = 0.0, mms_sigma = 0.1;
  std::string mms_wall = "zero";  // wall data: zero | exact

  // discretization
  int N = 160;
  int space_order = 4;
  double dt = 0.01;
  int order = 3;
  double t_fin = 0.1;
  double dt_ref = 1e-5;
  int N_ref = 160;
  std::vector<int> N_list{10, 20, 40, 80, 160};
  std::vector<long> nts_list{10, 20, 40, 80, 160, 320, 640};
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> dt_list{};
  std::vector<int> orders{2, 3};
  std::string mode = "mms";   // convergence-space: mms | reference
  std::string axis = "time";  // eps-sweep: time | space
  int fit_points = 3;         // slope fit over the last points of the sweep

  // outputs
  std::string csv = "out.csv";
  double px = 0.35, py = 0.35;
  long stride = 1;
  int repeats = 3;  // cpu-pareto timing repetitions (minimum is kept)
  int threads = 0;  // 0 = hardware concurrency
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
/// key=value overrides; the value is parsed as JSON, or taken as a string when that fails.
ExperimentConfig apply_overrides(const ExperimentConfig& cfg, const std::vector<std::string>& assignments);
/// Throws ConfigError on invalid combinations.
void validate(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace oscad
