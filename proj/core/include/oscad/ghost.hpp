#pragma once

#include <array>

#include "oscad/classification.hpp"
#include "oscad/operators.hpp"

namespace oscad {

struct LagrangeWeights {
  std::array<double, 4> l, dl, d2l;  // derivatives with respect to theta
};

/// Cubic Lagrange basis on nodes {0,1,2,3} at theta; requires 0 <= theta < 3.
LagrangeWeights lagrange_weights(double theta);
/// Same basis without the range check (used by the detector).
LagrangeWeights cubic_lagrange(double theta);

/// Upwind 4x4 interpolation of value and derivatives at the foot point B.
struct StencilWeights {
  std::array<int, 16> nodes;  // flat grid indices, index mx + 4*my
  std::array<double, 16> w_val, w_dx, w_dy, w_dxx, w_dyy, w_dxy;
};

StencilWeights build_stencil(int ghost_node, const BoundaryFrame& frame, const Classification& cls);

/// Constraint row sum(w_val c) = f_B, in active numbering.
struct DirichletGhostRow {
  SparseRow row;
  double rhs;
};
DirichletGhostRow ghost_row_dirichlet(const StencilWeights& w, const Classification& cls, double f_B);

/// Time-evolution row D (tau.grad)^2 c - (D/M) dc/dn evaluated at B.
SparseRow ghost_row_robin(const StencilWeights& w, const BoundaryFrame& frame, const Classification& cls, double D,
                          double M);

/// Adds Robin rows for every ghost to L (whose ghost rows must be empty).
SparseMatrix add_robin_rows(const SparseMatrix& L, const Classification& cls, double D, double M);
/// Dirichlet constraints c(B) = f(B, t) for every ghost.
ConstraintSet ghost_dirichlet_constraints(const Classification& cls, std::function<double(Point, double)> f);

}  // namespace oscad
