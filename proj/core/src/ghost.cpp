#include "oscad/ghost.hpp"

#include <algorithm>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {

LagrangeWeights cubic_lagrange(double t) {
  LagrangeWeights w;
  const double a = t, b = t - 1, c = t - 2, d = t - 3;
  w.l = {-b * c * d / 6, a * c * d / 2, -a * b * d / 2, a * b * c / 6};
  w.dl = {-(c * d + b * d + b * c) / 6, (c * d + a * d + a * c) / 2, -(b * d + a * d + a * b) / 2,
          (b * c + a * c + a * b) / 6};
  w.d2l = {-(b + c + d) / 3, (a + c + d), -(a + b + d), (a + b + c) / 3};
  return w;
}

LagrangeWeights lagrange_weights(double theta) {
  if (!(theta >= 0.0 && theta < 3.0)) throw std::invalid_argument("theta must lie in [0,3)");
  return cubic_lagrange(theta);
}

StencilWeights build_stencil(int ghost_node, const BoundaryFrame& fr, const Classification& cls) {
  const Grid& g = cls.grid();
  const double h = g.h();
  const NodeIndex G = g.unflat(ghost_node);
  const LagrangeWeights lx = lagrange_weights(fr.theta_x);
  const LagrangeWeights ly = lagrange_weights(fr.theta_y);
  StencilWeights w;
  for (int my = 0; my < 4; ++my) {
    for (int mx = 0; mx < 4; ++mx) {
      const int i = G.i + fr.s_x * mx, j = G.j + fr.s_y * my;
      if (!g.contains(i, j)) throw GeometryError("ghost stencil exits the grid");
      if (!cls.active(i, j)) throw GeometryError("ghost stencil touches an inactive node");
      const int k = mx + 4 * my;
      w.nodes[k] = g.flat(i, j);
      w.w_val[k] = lx.l[mx] * ly.l[my];
      w.w_dx[k] = fr.s_x * lx.dl[mx] * ly.l[my] / h;
      w.w_dy[k] = fr.s_y * lx.l[mx] * ly.dl[my] / h;
      w.w_dxx[k] = lx.d2l[mx] * ly.l[my] / (h * h);
      w.w_dyy[k] = lx.l[mx] * ly.d2l[my] / (h * h);
      w.w_dxy[k] = fr.s_x * fr.s_y * lx.dl[mx] * ly.dl[my] / (h * h);
    }
  }
  return w;
}

DirichletGhostRow ghost_row_dirichlet(const StencilWeights& w, const Classification& cls, double f_B) {
  DirichletGhostRow r;
  for (int k = 0; k < 16; ++k) r.row.add(cls.active_index(w.nodes[k]), w.w_val[k]);
  r.rhs = f_B;
  return r;
}

SparseRow ghost_row_robin(const StencilWeights& w, const BoundaryFrame& fr, const Classification& cls, double D,
                          double M) {
  if (!(M > 0.0)) throw std::invalid_argument("Robin ghost rows need M > 0");
  const double tx = fr.tau.x, ty = fr.tau.y;
  SparseRow r;
  for (int k = 0; k < 16; ++k) {
    const double tangential = tx * tx * w.w_dxx[k] + 2 * tx * ty * w.w_dxy[k] + ty * ty * w.w_dyy[k];
    const double normal = fr.n.x * w.w_dx[k] + fr.n.y * w.w_dy[k];
    r.add(cls.active_index(w.nodes[k]), D * tangential - (D / M) * normal);
  }
  return r;
}

SparseMatrix add_robin_rows(const SparseMatrix& L, const Classification& cls, double D, double M) {
  std::vector<int> rows;
  std::vector<SparseRow> repl;
  for (const GhostNode& gn : cls.ghosts()) {
    rows.push_back(cls.active_index(gn.node));
    repl.push_back(ghost_row_robin(build_stencil(gn.node, gn.frame, cls), gn.frame, cls, D, M));
  }
  return replace_rows(L, rows, repl);
}

ConstraintSet ghost_dirichlet_constraints(const Classification& cls, std::function<double(Point, double)> f) {
  ConstraintSet cs;
  cs.mask.assign(cls.n_active(), 0);
  if (f) cs.sources.push_back(std::move(f));
  std::vector<std::pair<int, const GhostNode*>> order;
  for (const GhostNode& gn : cls.ghosts()) order.push_back({cls.active_index(gn.node), &gn});
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [row, gn] : order) {
    auto r = ghost_row_dirichlet(build_stencil(gn->node, gn->frame, cls), cls, 0.0);
    cs.rows.push_back(row);
    cs.coeffs.push_back(std::move(r.row));
    cs.where.push_back(gn->frame.B);
    cs.source.push_back(cs.sources.empty() ? -1 : 0);
    cs.mask[row] = 1;
  }
  return cs;
}

}  // namespace oscad
