#pragma once

#include <cmath>

namespace oscad {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

struct NodeIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(NodeIndex, NodeIndex) = default;
};

/// Uniform square grid on [a,b]^2 with N cells per side and nodes at both ends.
class Grid {
 public:
  Grid(int n, double a, double b);

  int cells() const { return n_; }
  int side() const { return n_ + 1; }
  int node_count() const { return side() * side(); }
  double h() const { return h_; }
  double lo() const { return a_; }
  double hi() const { return b_; }

  double coord(int i) const { return a_ + i * h_; }
  Point coordinate_of(NodeIndex ij) const { return {coord(ij.i), coord(ij.j)}; }
  Point coordinate_of(int node) const { return coordinate_of(unflat(node)); }
  /// Nearest node to p (p need not be a node).
  NodeIndex index_of(Point p) const;

  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i <= n_ && j <= n_; }
  bool on_edge(int i, int j) const { return i == 0 || j == 0 || i == n_ || j == n_; }
  int flat(int i, int j) const { return j * side() + i; }
  int flat(NodeIndex ij) const { return flat(ij.i, ij.j); }
  NodeIndex unflat(int k) const { return {k % side(), k / side()}; }

 private:
  int n_;
  double a_, b_, h_;
};

/// Throws std::invalid_argument for N < 4 or b <= a.
Grid build_grid(int n, double a, double b);

}  // namespace oscad
