#pragma once

#include "oscad/classification.hpp"
#include "oscad/config.hpp"
#include "oscad/integrator.hpp"
#include "oscad/level_set.hpp"
#include "oscad/velocity.hpp"

namespace oscad {

/// Geometry, operators and initial data built from a configuration at one resolution.
struct Problem {
  Grid grid;
  LevelSet domain;
  Classification cls;
  VelocitySpec velocity;
  SemiDiscrete sys;
  double M = 0.0;  // adsorption length used by Robin rows (0 when unused)
  Point ic_center{};
  double ic_sigma = 0.1;

  /// Initial Gaussian sampled on every active unknown, ghosts included.
  Field initial() const;
};

LevelSet make_level_set(const ExperimentConfig& cfg);
VelocitySpec make_velocity(const ExperimentConfig& cfg);
TimeFactor make_time_factor(const ExperimentConfig& cfg, double epsilon);
double resolve_M(const ExperimentConfig& cfg);

Problem build_problem(const ExperimentConfig& cfg, int N);

}  // namespace oscad
