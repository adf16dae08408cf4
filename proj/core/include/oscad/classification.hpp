#pragma once

#include <cstdint>
#include <vector>

#include "oscad/grid.hpp"
#include "oscad/level_set.hpp"

namespace oscad {

enum class PointClass : std::uint8_t { Interior, NearWall, Wall, Ghost, Inactive };

const char* to_string(PointClass c);

/// Foot point on the interface and the local frame used by the ghost stencil.
struct BoundaryFrame {
  Point B;
  Point n;    // unit normal pointing into the obstacle
  Point tau;  // (-n.y, n.x)
  int s_x = 1, s_y = 1;
  double theta_x = 0.0, theta_y = 0.0;
};

struct GhostNode {
  int node;  // flat grid index
  BoundaryFrame frame;
  /// 1 for nodes next to the fluid; higher layers exist only because a lower layer's stencil needs them.
  int layer = 1;
};

/// Node partition plus the dense numbering of active unknowns.
class Classification {
 public:
  Classification(Grid grid, std::vector<PointClass> classes, std::vector<GhostNode> ghosts);

  const Grid& grid() const { return grid_; }
  PointClass at(int node) const { return classes_[node]; }
  PointClass at(int i, int j) const { return classes_[grid_.flat(i, j)]; }
  const std::vector<PointClass>& classes() const { return classes_; }

  bool active(int node) const { return active_index_[node] >= 0; }
  bool active(int i, int j) const { return grid_.contains(i, j) && active(grid_.flat(i, j)); }
  /// -1 for inactive nodes.
  int active_index(int node) const { return active_index_[node]; }
  int node_of(int active) const { return node_of_active_[active]; }
  int n_active() const { return static_cast<int>(node_of_active_.size()); }

  /// Interior plus NearWall nodes.
  int n_interior() const { return n_interior_; }
  int n_wall() const { return n_wall_; }
  int n_ghost() const { return static_cast<int>(ghosts_.size()); }
  const std::vector<GhostNode>& ghosts() const { return ghosts_; }

  /// Fluid nodes carry the PDE or a wall condition.
  bool is_fluid(int node) const {
    const auto c = classes_[node];
    return c == PointClass::Interior || c == PointClass::NearWall || c == PointClass::Wall;
  }

 private:
  Grid grid_;
  std::vector<PointClass> classes_;
  std::vector<int> active_index_;
  std::vector<int> node_of_active_;
  std::vector<GhostNode> ghosts_;
  int n_interior_ = 0, n_wall_ = 0;
};

/// phi with values closer than 1e-14 h to zero moved to the fluid side.
double nudged_phi(const LevelSet& ls, Point p, double h);

/// Inactive nodes inside a ghost stencil are promoted to ghosts of the next layer (up to kMaxGhostLayer).
/// Throws GeometryError when a ghost stencil leaves the grid or the promotion does not close.
Classification classify(const Grid& grid, const LevelSet& domain);

inline constexpr int kMaxGhostLayer = 3;

/// Foot point, normal, tangent, upwind signs and offsets for a ghost at G.
/// Offsets must stay below max_theta cells (1 for first layer ghosts).
BoundaryFrame closest_boundary_point(Point G, const LevelSet& domain, double h, double max_theta = 1.0);

}  // namespace oscad
