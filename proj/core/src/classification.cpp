#include "oscad/classification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

constexpr int kMaxNewton = 50;

std::string where(Point p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

// Newton projection of x onto phi = 0 along the gradient.
Point project(Point x, const LevelSet& ls, double tol, Point ghost) {
  for (int it = 0; it < kMaxNewton; ++it) {
    const double f = ls.phi(x);
    if (std::abs(f) <= tol) return x;
    const Point g = ls.grad(x);
    const double g2 = dot(g, g);
    if (g2 == 0.0) throw GeometryError("vanishing level-set gradient while projecting ghost " + where(ghost));
    Point step = (f / g2) * g;
    // damp steps that would overshoot far beyond the local scale
    const double len = norm(step);
    const double cap = 0.5;
    if (len > cap) step = (cap / len) * step;
    x = x - step;
  }
  const double f = ls.phi(x);
  if (std::abs(f) <= tol) return x;
  std::ostringstream os;
  os << "boundary projection of ghost " << where(ghost) << " did not converge, residual " << f;
  throw GeometryError(os.str());
}

int upwind_sign(double d) { return d < 0.0 ? -1 : 1; }

Point unit_normal(const LevelSet& ls, Point x, Point ghost) {
  const Point g = ls.grad(x);
  const double gn = norm(g);
  if (gn == 0.0) throw GeometryError("vanishing level-set gradient at foot point of ghost " + where(ghost));
  return (1.0 / gn) * g;
}

// Stationary point of |x - G| on the interface, starting from the interface point x0.
// Secant iteration on F(s) = (y(s) - G).tau(y(s)) with y(s) the projection of x0 + s tau0; near a center
// of curvature (concave pockets) plain tangential corrections converge only linearly. A damped descent
// backs it up. Finite difference gradients stall F near 1e-10 h, which is accepted below 1e-9 h.
Point foot_point(Point G, Point x0, const LevelSet& ls, double h, double tol) {
  const Point n0 = unit_normal(ls, x0, G);
  const Point tau0{-n0.y, n0.x};
  auto F = [&](double s, Point& y) {
    y = project(x0 + s * tau0, ls, tol, G);
    const Point n = unit_normal(ls, y, G);
    return dot(y - G, Point{-n.y, n.x});
  };
  Point y0, y1;
  double s0 = 0.0, f0 = F(s0, y0);
  if (std::abs(f0) <= 1e-13 * h) return y0;
  double s1 = -f0, f1 = F(s1, y1);
  for (int it = 0; it < kMaxNewton; ++it) {
    if (std::abs(f1) <= 1e-13 * h) return y1;
    if (f1 == f0) break;
    const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    if (!std::isfinite(s2) || std::abs(s2) > 4 * h) break;
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = F(s1, y1);
  }
  if (std::abs(f1) <= 1e-9 * h) return y1;

  Point x = x0;
  double dist = norm(x - G);
  for (int it = 0; it < 20 * kMaxNewton; ++it) {
    const Point n = unit_normal(ls, x, G);
    const Point d = x - G;
    const Point t = d - dot(d, n) * n;
    const double tn = norm(t);
    if (tn <= 1e-13 * h) return x;
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
      const Point y = project(x - alpha * t, ls, tol, G);
      const double dy = norm(y - G);
      if (dy < dist) {
        x = y;
        dist = dy;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (tn <= 1e-9 * h) return x;
      break;
    }
  }
  throw GeometryError("closest point iteration for ghost " + where(G) + " did not converge");
}

}  // namespace

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Interior: return "interior";
    case PointClass::NearWall: return "near-wall";
    case PointClass::Wall: return "wall";
    case PointClass::Ghost: return "ghost";
    case PointClass::Inactive: return "inactive";
  }
  return "?";
}

Classification::Classification(Grid grid, std::vector<PointClass> classes, std::vector<GhostNode> ghosts)
    : grid_(grid), classes_(std::move(classes)), ghosts_(std::move(ghosts)) {
  active_index_.assign(classes_.size(), -1);
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    if (classes_[k] == PointClass::Inactive) continue;
    active_index_[k] = static_cast<int>(node_of_active_.size());
    node_of_active_.push_back(static_cast<int>(k));
    if (classes_[k] == PointClass::Interior || classes_[k] == PointClass::NearWall) ++n_interior_;
    if (classes_[k] == PointClass::Wall) ++n_wall_;
  }
}

double nudged_phi(const LevelSet& ls, Point p, double h) {
  const double f = ls.phi(p);
  if (std::abs(f) < 1e-14 * h) return -1e-14 * h;
  return f;
}

BoundaryFrame closest_boundary_point(Point G, const LevelSet& domain, double h, double max_theta) {
  BoundaryFrame fr;
  if (const auto* c = domain.as_circle()) {
    const Point d = G - c->center;
    const double r = norm(d);
    if (r == 0.0) throw GeometryError("ghost " + where(G) + " sits on the circle center, normal undefined");
    fr.B = c->center + (c->radius / r) * d;
    fr.n = {-d.x / r, -d.y / r};
  } else {
    const double tol = 1e-12 * h;
    // Newton lands on the interface but not necessarily at the closest point
    const Point x = foot_point(G, project(G, domain, tol, G), domain, h, tol);
    fr.B = x;
    const Point g = domain.grad(x);
    fr.n = (1.0 / norm(g)) * g;
  }
  fr.tau = {-fr.n.y, fr.n.x};
  fr.s_x = upwind_sign(fr.B.x - G.x);
  fr.s_y = upwind_sign(fr.B.y - G.y);
  fr.theta_x = fr.s_x * (fr.B.x - G.x) / h;
  fr.theta_y = fr.s_y * (fr.B.y - G.y) / h;
  // a neighbor lying exactly on the interface was nudged into the fluid, so its foot point
  // is a whole cell away; pull theta just below 1 (the interpolant changes by rounding only)
  for (double* th : {&fr.theta_x, &fr.theta_y})
    if (*th >= 1.0 && *th <= 1.0 + 1e-9) *th = std::nextafter(1.0, 0.0);
  if (!(fr.theta_x < max_theta && fr.theta_y < max_theta)) {
    std::ostringstream os;
    os << "foot point of ghost " << where(G) << " is too far away (theta " << fr.theta_x << ", " << fr.theta_y
       << ")";
    throw GeometryError(os.str());
  }
  return fr;
}

Classification classify(const Grid& grid, const LevelSet& domain) {
  const int n = grid.cells();
  const double h = grid.h();
  std::vector<double> phi(grid.node_count());
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) phi[grid.flat(i, j)] = nudged_phi(domain, grid.coordinate_of({i, j}), h);

  std::vector<PointClass> cls(grid.node_count(), PointClass::Inactive);
  std::vector<GhostNode> ghosts;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int k = grid.flat(i, j);
      if (phi[k] <= 0.0) {
        if (grid.on_edge(i, j))
          cls[k] = PointClass::Wall;
        else if (i == 1 || j == 1 || i == n - 1 || j == n - 1)
          cls[k] = PointClass::NearWall;
        else
          cls[k] = PointClass::Interior;
        continue;
      }
      for (int d = 0; d < 4; ++d) {
        const int ii = i + di[d], jj = j + dj[d];
        if (grid.contains(ii, jj) && phi[grid.flat(ii, jj)] <= 0.0) {
          cls[k] = PointClass::Ghost;
          break;
        }
      }
    }
  }

  // Layer by layer: frames of the current ghosts, then promotion of inactive stencil nodes.
  // Inside a convex fluid region the far corner of an upwind block can miss the first layer.
  std::vector<int> layer_nodes;
  for (int k = 0; k < grid.node_count(); ++k)
    if (cls[k] == PointClass::Ghost) layer_nodes.push_back(k);
  for (int layer = 1; !layer_nodes.empty(); ++layer) {
    if (layer > kMaxGhostLayer)
      throw GeometryError("ghost stencils still reach inactive nodes after " + std::to_string(kMaxGhostLayer) +
                          " layers; refine the grid");
    std::vector<int> next;
    for (int k : layer_nodes) {
      const auto [i, j] = grid.unflat(k);
      const Point G = grid.coordinate_of({i, j});
      const BoundaryFrame fr = closest_boundary_point(G, domain, h, layer == 1 ? 1.0 : 3.0);
      for (int my = 0; my < 4; ++my) {
        for (int mx = 0; mx < 4; ++mx) {
          const int ii = i + fr.s_x * mx, jj = j + fr.s_y * my;
          if (!grid.contains(ii, jj))
            throw GeometryError("16-point stencil of ghost " + where(G) + " exits the grid");
          const int kk = grid.flat(ii, jj);
          if (cls[kk] == PointClass::Inactive) {
            cls[kk] = PointClass::Ghost;
            next.push_back(kk);
          }
        }
      }
      ghosts.push_back({k, fr, layer});
    }
    std::sort(next.begin(), next.end());
    layer_nodes.swap(next);
  }
  std::sort(ghosts.begin(), ghosts.end(), [](const GhostNode& a, const GhostNode& b) { return a.node < b.node; });
  return Classification(grid, std::move(cls), std::move(ghosts));
}

}  // namespace oscad
