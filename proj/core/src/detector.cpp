#include "oscad/detector.hpp"

#include <algorithm>
#include <cmath>

#include "oscad/errors.hpp"
#include "oscad/ghost.hpp"

namespace oscad {

double probe(const Classification& cls, const Field& c, Point P) {
  const Grid& g = cls.grid();
  const double h = g.h();
  const double fx = (P.x - g.lo()) / h, fy = (P.y - g.lo()) / h;
  if (fx < 0 || fy < 0 || fx > g.cells() || fy > g.cells()) throw GeometryError("detector point outside the grid");
  // cell containing P, then the 4x4 block starting one node to the lower left, shifted inside the grid
  const int ci = std::min(static_cast<int>(std::floor(fx)), g.cells() - 1);
  const int cj = std::min(static_cast<int>(std::floor(fy)), g.cells() - 1);
  const int i0 = std::clamp(ci - 1, 0, g.cells() - 3);
  const int j0 = std::clamp(cj - 1, 0, g.cells() - 3);
  for (int m = 0; m < 16; ++m) {
    const int node = g.flat(i0 + m % 4, j0 + m / 4);
    if (!cls.is_fluid(node)) {
      const int near = g.flat(std::lround(fx), std::lround(fy));
      if (!cls.is_fluid(near)) throw GeometryError("detector point lies inside the obstacle");
      throw GeometryError("detector point has no 4x4 fluid block around it");
    }
  }
  const LagrangeWeights wx = cubic_lagrange(fx - i0), wy = cubic_lagrange(fy - j0);
  double v = 0.0;
  for (int my = 0; my < 4; ++my)
    for (int mx = 0; mx < 4; ++mx)
      v += wx.l[mx] * wy.l[my] * c[cls.active_index(g.flat(i0 + mx, j0 + my))];
  return v;
}

}  // namespace oscad
