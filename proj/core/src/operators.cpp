#include "oscad/operators.hpp"

#include <algorithm>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

constexpr std::array<double, 5> kSecond4 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
constexpr std::array<double, 5> kSecond2 = {0.0, 1.0, -2.0, 1.0, 0.0};
constexpr std::array<double, 5> kFirst4 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr std::array<double, 5> kFirst2 = {0.0, -0.5, 0.0, 0.5, 0.0};

bool has_pde_row(PointClass c) { return c == PointClass::Interior || c == PointClass::NearWall; }

// Availability of the 5 nodes along one direction through (i,j).
std::array<bool, 5> availability(const Classification& cls, int i, int j, int dx, int dy) {
  std::array<bool, 5> a{};
  for (int k = -2; k <= 2; ++k) a[k + 2] = cls.active(i + k * dx, j + k * dy);
  return a;
}

// Shared assembly: per direction 1D weights w[k] multiply coef(node_k) * c_k.
template <class Coef>
SparseMatrix assemble(const Classification& cls, const std::array<double, 5>& w4, const std::array<double, 5>& w2,
                      double scale, bool wide, Coef coef_x, Coef coef_y) {
  const Grid& g = cls.grid();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(cls.n_active()) * 9);
  for (int row = 0; row < cls.n_active(); ++row) {
    const int node = cls.node_of(row);
    if (!has_pde_row(cls.at(node))) continue;
    const NodeIndex ij = g.unflat(node);
    for (int dir = 0; dir < 2; ++dir) {
      const int dx = dir == 0 ? 1 : 0, dy = dir == 0 ? 0 : 1;
      std::array<double, 5> w;
      if (wide) {
        w = reduce_stencil(w4, availability(cls, ij.i, ij.j, dx, dy), w2);
      } else {
        w = w2;
      }
      for (int k = -2; k <= 2; ++k) {
        if (w[k + 2] == 0.0) continue;
        const int nb = g.flat(ij.i + k * dx, ij.j + k * dy);
        const double c = dir == 0 ? coef_x(nb) : coef_y(nb);
        trip.emplace_back(row, cls.active_index(nb), scale * w[k + 2] * c);
      }
    }
  }
  SparseMatrix A(cls.n_active(), cls.n_active());
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

void require_square(const Classification& cls, const char* what) {
  if (cls.n_ghost() > 0) throw std::invalid_argument(std::string(what) + " is defined on the plain square only");
}

}  // namespace

std::array<double, 5> reduce_stencil(std::array<double, 5> w, const std::array<bool, 5>& av,
                                     const std::array<double, 5>& fallback) {
  if (!av[1] || !av[3]) throw GeometryError("stencil neighbor at distance h is not an active node");
  if (!av[0] && !av[4]) return fallback;
  // c(x-2h) = 4c(x-h) + 4c(x+h) - c(x+2h) - 6c(x), exact for cubics; mirrored for the right side
  if (!av[0]) {
    const double a = w[0];
    w[0] = 0.0;
    w[1] += 4 * a;
    w[3] += 4 * a;
    w[4] -= a;
    w[2] -= 6 * a;
  }
  if (!av[4]) {
    const double a = w[4];
    w[4] = 0.0;
    w[3] += 4 * a;
    w[1] += 4 * a;
    w[0] -= a;
    w[2] -= 6 * a;
  }
  return w;
}

SparseMatrix laplacian_2nd(const Classification& cls, double D) {
  require_square(cls, "laplacian_2nd");
  const double h = cls.grid().h();
  auto one = [](int) { return 1.0; };
  return assemble(cls, kSecond2, kSecond2, D / (h * h), false, one, one);
}

SparseMatrix advection_2nd(const Classification& cls, double u) {
  require_square(cls, "advection_2nd");
  const double h = cls.grid().h();
  auto one = [](int) { return 1.0; };
  return assemble(cls, kFirst2, kFirst2, u / h, false, one, one);
}

SparseMatrix laplacian_4th(const Classification& cls, double D) {
  const double h = cls.grid().h();
  auto one = [](int) { return 1.0; };
  return assemble(cls, kSecond4, kSecond2, D / (h * h), true, one, one);
}

SparseMatrix advection_4th_const(const Classification& cls, double u) {
  const double h = cls.grid().h();
  auto one = [](int) { return 1.0; };
  return assemble(cls, kFirst4, kFirst2, u / h, true, one, one);
}

SparseMatrix advection_4th_variable(const Classification& cls, const VelocityField& V) {
  const double h = cls.grid().h();
  auto vx = [&](int node) { return V.vx[node]; };
  auto vy = [&](int node) { return V.vy[node]; };
  std::function<double(int)> fx = vx, fy = vy;
  return assemble(cls, kFirst4, kFirst2, 1.0 / h, true, fx, fy);
}

std::vector<double> ConstraintSet::values(double t) const {
  std::vector<double> v(rows.size(), 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (source[k] >= 0 && sources[source[k]]) v[k] = sources[source[k]](where[k], t);
  return v;
}

ConstraintSet wall_constraints(const Classification& cls, const WallCondition& wall) {
  const Grid& g = cls.grid();
  const int n = g.cells();
  const double h = g.h();
  ConstraintSet cs;
  cs.mask.assign(cls.n_active(), 0);
  if (wall.f) cs.sources.push_back(wall.f);
  static constexpr double kOneSided[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  for (int row = 0; row < cls.n_active(); ++row) {
    const int node = cls.node_of(row);
    if (cls.at(node) != PointClass::Wall) continue;
    const NodeIndex ij = g.unflat(node);
    SparseRow r;
    if (wall.kind == WallKind::Dirichlet) {
      r.add(row, 1.0);
    } else if (wall.kind == WallKind::NeumannHomogeneous) {
      // inward one-sided derivative along each wall normal; corners sum both
      auto add_dir = [&](int dx, int dy) {
        for (int k = 0; k < 5; ++k) {
          const int ii = ij.i + k * dx, jj = ij.j + k * dy;
          if (!cls.active(ii, jj)) throw GeometryError("Neumann wall stencil touches an inactive node");
          r.add(cls.active_index(g.flat(ii, jj)), kOneSided[k] / (12.0 * h));
        }
      };
      if (ij.i == 0) add_dir(1, 0);
      if (ij.i == n) add_dir(-1, 0);
      if (ij.j == 0) add_dir(0, 1);
      if (ij.j == n) add_dir(0, -1);
    } else {
      throw std::invalid_argument("unknown wall condition");
    }
    cs.rows.push_back(row);
    cs.coeffs.push_back(std::move(r));
    cs.where.push_back(g.coordinate_of(ij));
    cs.source.push_back(wall.kind == WallKind::Dirichlet && wall.f ? 0 : -1);
    cs.mask[row] = 1;
  }
  return cs;
}

ConstraintSet merge(const ConstraintSet& a, const ConstraintSet& b, int n_active) {
  ConstraintSet out;
  out.mask.assign(n_active, 0);
  out.sources = a.sources;
  const int offset = static_cast<int>(a.sources.size());
  out.sources.insert(out.sources.end(), b.sources.begin(), b.sources.end());
  std::vector<std::pair<int, std::pair<const ConstraintSet*, std::size_t>>> order;
  for (std::size_t k = 0; k < a.rows.size(); ++k) order.push_back({a.rows[k], {&a, k}});
  for (std::size_t k = 0; k < b.rows.size(); ++k) order.push_back({b.rows[k], {&b, k}});
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [row, src] : order) {
    if (out.mask[row]) throw std::invalid_argument("constraint sets overlap");
    const auto& [set, k] = src;
    out.rows.push_back(row);
    out.coeffs.push_back(set->coeffs[k]);
    out.where.push_back(set->where[k]);
    const int s = set->source[k];
    out.source.push_back(s < 0 ? -1 : (set == &a ? s : s + offset));
    out.mask[row] = 1;
  }
  return out;
}

OperatorWithRhs apply_wall_bc(const SparseMatrix& op, const Classification& cls, const WallCondition& wall,
                              double t) {
  const ConstraintSet cs = wall_constraints(cls, wall);
  OperatorWithRhs out{replace_rows(op, cs.rows, cs.coeffs), Field::Zero(op.rows())};
  const auto v = cs.values(t);
  for (std::size_t k = 0; k < cs.rows.size(); ++k) out.rhs[cs.rows[k]] = v[k];
  return out;
}

// sparse helpers

SparseMatrix mask_rows(const SparseMatrix& A, const std::vector<char>& mask) {
  SparseMatrix B = A;
  for (int r = 0; r < B.outerSize(); ++r) {
    if (!mask.empty() && mask[r])
      for (SparseMatrix::InnerIterator it(B, r); it; ++it) it.valueRef() = 0.0;
  }
  B.prune(0.0);
  B.makeCompressed();
  return B;
}

SparseMatrix replace_rows(const SparseMatrix& A, const std::vector<int>& rows, const std::vector<SparseRow>& repl) {
  std::vector<char> mask(A.rows(), 0);
  for (int r : rows) mask[r] = 1;
  std::vector<Triplet> trip;
  trip.reserve(A.nonZeros() + rows.size() * 5);
  for (int r = 0; r < A.outerSize(); ++r) {
    if (mask[r]) continue;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  }
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t m = 0; m < repl[k].cols.size(); ++m) trip.emplace_back(rows[k], repl[k].cols[m], repl[k].vals[m]);
  SparseMatrix B(A.rows(), A.cols());
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  return B;
}

SparseMatrix identity(int n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

double inf_norm(const SparseMatrix& A) {
  double m = 0.0;
  for (int r = 0; r < A.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) s += std::abs(it.value());
    m = std::max(m, s);
  }
  return m;
}

}  // namespace oscad
