#include "oscad/grid.hpp"

#include <stdexcept>
#include <string>

namespace oscad {

Grid::Grid(int n, double a, double b) : n_(n), a_(a), b_(b), h_((b - a) / n) {
  if (n < 4) throw std::invalid_argument("grid needs N >= 4, got " + std::to_string(n));
  if (!(b > a)) throw std::invalid_argument("grid needs b > a");
}

NodeIndex Grid::index_of(Point p) const {
  return {static_cast<int>(std::lround((p.x - a_) / h_)), static_cast<int>(std::lround((p.y - a_) / h_))};
}

Grid build_grid(int n, double a, double b) { return Grid(n, a, b); }

}  // namespace oscad
