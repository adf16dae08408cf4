#pragma once

#include <functional>

#include "oscad/classification.hpp"
#include "oscad/sparse.hpp"
#include "oscad/velocity.hpp"

namespace oscad {

// Rows exist for Interior and NearWall nodes only; wall and ghost rows are
// left empty here and filled by the boundary treatment.

SparseMatrix laplacian_2nd(const Classification& cls, double D);
SparseMatrix advection_2nd(const Classification& cls, double u);
SparseMatrix laplacian_4th(const Classification& cls, double D);
SparseMatrix advection_4th_const(const Classification& cls, double u);
/// Conservative form: row approximates div(V c) with products V_k c_k at stencil nodes.
SparseMatrix advection_4th_variable(const Classification& cls, const VelocityField& V);

/// 1D weights at offsets -2..2 (unit spacing) after removing unavailable far nodes.
std::array<double, 5> reduce_stencil(std::array<double, 5> w, const std::array<bool, 5>& available,
                                     const std::array<double, 5>& fallback);

enum class WallKind { Dirichlet, NeumannHomogeneous };

struct WallCondition {
  WallKind kind = WallKind::Dirichlet;
  /// Dirichlet data f(p, t); empty means zero.
  std::function<double(Point, double)> f;
};

/// Algebraic rows of the semi-discrete system (walls, Dirichlet ghosts).
struct ConstraintSet {
  std::vector<int> rows;  // active indices, ascending
  std::vector<SparseRow> coeffs;
  std::vector<Point> where;  // location whose data defines the rhs
  std::vector<int> source;   // index into sources, -1 means zero data
  std::vector<std::function<double(Point, double)>> sources;
  std::vector<char> mask;  // size n_active

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
  /// rhs values at time t, one per constraint row.
  std::vector<double> values(double t) const;
  bool contains(int row) const { return !mask.empty() && mask[row]; }
};

ConstraintSet wall_constraints(const Classification& cls, const WallCondition& wall);
/// Concatenates two sets; rows must be disjoint.
ConstraintSet merge(const ConstraintSet& a, const ConstraintSet& b, int n_active);

struct OperatorWithRhs {
  SparseMatrix op;
  Field rhs;
};

/// Replace wall rows of op by the wall condition rows (identity for Dirichlet).
OperatorWithRhs apply_wall_bc(const SparseMatrix& op, const Classification& cls, const WallCondition& wall,
                              double t = 0.0);

}  // namespace oscad
