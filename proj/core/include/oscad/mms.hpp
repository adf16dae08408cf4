#pragma once

#include <Eigen/SparseLU>

#include "oscad/classification.hpp"
#include "oscad/integrator.hpp"
#include "oscad/velocity.hpp"

namespace oscad {

enum class AdvectionForm { Constant, Conservative };

/// c = cos(t) G1 + sin(t) G2 with Gaussians of width sigma, and the forcing that makes it exact.
struct ManufacturedCase {
  Point center1{0.0, 0.0};
  Point center2{0.0, 0.0};
  double sigma = 0.1;
  double D = 1.0;
  VelocitySpec velocity{};
  /// Constant: u (c_x + c_y); Conservative: div(V c).
  AdvectionForm form = AdvectionForm::Constant;
  bool zero = false;  // the trivial solution c = 0
};

double exact_solution(const ManufacturedCase& mc, double x, double y, double t);
double forcing(const ManufacturedCase& mc, double x, double y, double t);

/// Single Gaussian used as initial condition in the oscillatory experiments.
double gaussian(Point center, double sigma, Point p);

/// Samples f on the active unknowns of a classification.
Field sample(const Classification& cls, const std::function<double(Point)>& f);

/// Crank-Nicolson with forcing for spatial studies. Constraint rows (walls) take the data at t^{n+1}.
class CrankNicolson {
 public:
  CrankNicolson(const SparseMatrix& op, const ConstraintSet& constraints, double dt);
  Field step(const Field& c, const Field& F_n, const Field& F_np1, double t_np1) const;

 private:
  SparseMatrix rhs_op_;
  ConstraintSet constraints_;
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>> lu_;
  double dt_;
};

/// (I - dt/2 Op) c^{n+1} = (I + dt/2 Op) c^n + dt/2 (F^n + F^{n+1}), no constraint rows.
Field cn_forced_step(const SparseMatrix& op, const Field& c_n, const Field& F_n, const Field& F_np1, double dt);

struct ErrorNorms {
  double e1 = 0.0, e2 = 0.0, einf = 0.0;
};

/// Relative errors ||num - ref|| / ||ref|| in the plain vector 1, 2 and max norms.
ErrorNorms error_norms(const Field& numeric, const Field& reference);

}  // namespace oscad
