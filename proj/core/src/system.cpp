#include "oscad/system.hpp"

#include <cmath>

#include "oscad/adsorption.hpp"
#include "oscad/errors.hpp"
#include "oscad/ghost.hpp"
#include "oscad/mms.hpp"
#include "oscad/operators.hpp"

namespace oscad {

LevelSet make_level_set(const ExperimentConfig& cfg) {
  switch (shape_from_string(cfg.shape)) {
    case ShapeKind::None: return LevelSet::none();
    case ShapeKind::Circle: return LevelSet::circle({cfg.shape_cx, cfg.shape_cy}, cfg.shape_radius);
    case ShapeKind::Ellipse: return LevelSet::ellipse();
    case ShapeKind::Flower: return LevelSet::flower();
    case ShapeKind::Cardioid: return LevelSet::cardioid();
    case ShapeKind::Custom: break;
  }
  throw ConfigError("shape cannot be built from a configuration");
}

VelocitySpec make_velocity(const ExperimentConfig& cfg) {
  VelocitySpec v;
  v.kind = velocity_from_string(cfg.velocity);
  v.A = cfg.A;
  v.gamma = cfg.gamma;
  v.u = cfg.u;
  return v;
}

TimeFactor make_time_factor(const ExperimentConfig& cfg, double epsilon) {
  return time_factor_from_string(cfg.time_factor) == TimeFactorKind::Cosine ? TimeFactor::cosine(epsilon)
                                                                             : TimeFactor::constant();
}

double resolve_M(const ExperimentConfig& cfg) { return cfg.M ? *cfg.M : compute_M(cfg.delta, cfg.phi, cfg.L_cut); }

Field Problem::initial() const {
  return sample(cls, [&](Point p) { return gaussian(ic_center, ic_sigma, p); });
}

Problem build_problem(const ExperimentConfig& cfg, int N) {
  validate(cfg);
  const Grid grid = build_grid(N, cfg.a, cfg.b);
  LevelSet ls = make_level_set(cfg);
  Classification cls = classify(grid, ls);
  const VelocitySpec vel = make_velocity(cfg);
  const VelocityField V = sample_velocity(vel, cls);
  for (int k = 0; k < grid.node_count(); ++k)
    if (cls.active(k) && !(std::isfinite(V.vx[k]) && std::isfinite(V.vy[k])))
      throw ConfigError("velocity is singular at an active node; radial velocity with gamma = 0 needs an obstacle at the origin");

  SemiDiscrete sys;
  sys.L = cfg.space_order == 4 ? laplacian_4th(cls, cfg.D) : laplacian_2nd(cls, cfg.D);
  if (vel.kind == VelocityKind::Constant)
    sys.Q = cfg.space_order == 4 ? advection_4th_const(cls, vel.u) : advection_2nd(cls, vel.u);
  else
    sys.Q = advection_4th_variable(cls, V);

  double M = 0.0;
  WallCondition wall;
  wall.kind = cfg.walls == "neumann" ? WallKind::NeumannHomogeneous : WallKind::Dirichlet;
  ConstraintSet cs = wall_constraints(cls, wall);
  if (cls.n_ghost() > 0) {
    if (cfg.ghost_bc == "robin") {
      M = resolve_M(cfg);
      sys.L = add_robin_rows(sys.L, cls, cfg.D, M);
    } else {
      cs = merge(cs, ghost_dirichlet_constraints(cls, {}), cls.n_active());
    }
  }
  sys.constraints = std::move(cs);
  return Problem{grid, std::move(ls), std::move(cls), vel, std::move(sys), M, {cfg.ic_x, cfg.ic_y}, cfg.ic_sigma};
}

}  // namespace oscad
