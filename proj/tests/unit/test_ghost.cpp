#include <doctest.h>

#include <cmath>
#include <random>

#include "oscad/errors.hpp"
#include "oscad/ghost.hpp"
#include "oscad/mms.hpp"

using namespace oscad;

namespace {

// q(x, y) = sum a_ij x^i y^j with per-variable degree <= 3, and its derivatives
struct Bicubic {
  double a[4][4];
  double val(double x, double y, int dx = 0, int dy = 0) const {
    double s = 0.0;
    for (int i = dx; i < 4; ++i)
      for (int j = dy; j < 4; ++j) {
        double c = a[i][j];
        for (int k = 0; k < dx; ++k) c *= i - k;
        for (int k = 0; k < dy; ++k) c *= j - k;
        s += c * std::pow(x, i - dx) * std::pow(y, j - dy);
      }
    return s;
  }
};

double contract(const std::array<double, 16>& w, const std::array<int, 16>& nodes, const Grid& g,
                const std::function<double(Point)>& f) {
  double s = 0.0;
  for (int k = 0; k < 16; ++k) s += w[k] * f(g.coordinate_of(nodes[k]));
  return s;
}

}  // namespace

TEST_CASE("Lagrange basis values") {
  const auto w0 = lagrange_weights(0.0);
  CHECK(w0.l == std::array<double, 4>{1, 0, 0, 0});
  for (int k = 0; k < 4; ++k) CHECK(w0.d2l[k] == doctest::Approx(std::array<double, 4>{2, -5, 4, -1}[k]));
  const auto w = lagrange_weights(0.5);
  auto p = [](double t) { return t * t * t - 2 * t + 1; };
  double s = 0;
  for (int k = 0; k < 4; ++k) s += w.l[k] * p(k);
  CHECK(s == doctest::Approx(p(0.5)).epsilon(1e-15));
  double ds = 0, d2s = 0;
  for (int k = 0; k < 4; ++k) {
    ds += w.dl[k] * p(k);
    d2s += w.d2l[k] * p(k);
  }
  CHECK(ds == doctest::Approx(3 * 0.25 - 2));
  CHECK(d2s == doctest::Approx(3.0));
  const auto w2 = lagrange_weights(2.25);
  double s2 = 0;
  for (int k = 0; k < 4; ++k) s2 += w2.l[k] * p(k);
  CHECK(s2 == doctest::Approx(p(2.25)).epsilon(1e-14));
  CHECK_THROWS(lagrange_weights(3.0));
  CHECK_THROWS(lagrange_weights(-0.1));
}

TEST_CASE("stencil weights sum rules and the trivial offset") {
  const auto c = classify(build_grid(40, -1, 1), LevelSet::circle({0, 0}, 0.2));
  for (const auto& gh : c.ghosts()) {
    const auto w = build_stencil(gh.node, gh.frame, c);
    auto sum = [](const std::array<double, 16>& a) {
      double s = 0;
      for (double v : a) s += v;
      return s;
    };
    const double h = c.grid().h();
    CHECK(std::abs(sum(w.w_val) - 1) <= 1e-12);
    CHECK(std::abs(sum(w.w_dx)) * h <= 1e-12);
    CHECK(std::abs(sum(w.w_dy)) * h <= 1e-12);
    CHECK(std::abs(sum(w.w_dxx)) * h * h <= 1e-12);
    CHECK(std::abs(sum(w.w_dyy)) * h * h <= 1e-12);
    CHECK(std::abs(sum(w.w_dxy)) * h * h <= 1e-12);
    // upwind: offsets share the signs s_x, s_y
    const NodeIndex G = c.grid().unflat(gh.node);
    for (int k = 0; k < 16; ++k) {
      const NodeIndex m = c.grid().unflat(w.nodes[k]);
      CHECK((m.i - G.i) * gh.frame.s_x >= 0);
      CHECK((m.j - G.j) * gh.frame.s_y >= 0);
    }
  }
  BoundaryFrame f;
  f.theta_x = f.theta_y = 0;
  const auto g0 = c.ghosts().front();
  f.s_x = g0.frame.s_x;
  f.s_y = g0.frame.s_y;
  const auto w = build_stencil(g0.node, f, c);
  CHECK(w.w_val[0] == 1.0);
  for (int k = 1; k < 16; ++k) CHECK(w.w_val[k] == 0.0);
}

TEST_CASE("ghost interpolation is exact on bicubic polynomials") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1), rad(0.15, 0.4);
  std::vector<LevelSet> shapes = {LevelSet::ellipse(), LevelSet::flower(), LevelSet::cardioid()};
  for (int t = 0; t < 6; ++t) shapes.push_back(LevelSet::circle({0.1 * U(rng), 0.1 * U(rng)}, rad(rng)));
  for (const auto& ls : shapes) {
    const auto c = classify(build_grid(64, -1, 1), ls);
    Bicubic q;
    for (auto& row : q.a)
      for (double& v : row) v = U(rng);
    const Grid& g = c.grid();
    for (const auto& gh : c.ghosts()) {
      const auto w = build_stencil(gh.node, gh.frame, c);
      const Point B = gh.frame.B;
      auto f = [&](Point p) { return q.val(p.x, p.y); };
      auto close = [](double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); };
      CHECK(close(contract(w.w_val, w.nodes, g, f), q.val(B.x, B.y), std::abs(q.val(B.x, B.y))));
      CHECK(close(contract(w.w_dx, w.nodes, g, f), q.val(B.x, B.y, 1, 0), std::abs(q.val(B.x, B.y, 1, 0))));
      CHECK(close(contract(w.w_dy, w.nodes, g, f), q.val(B.x, B.y, 0, 1), std::abs(q.val(B.x, B.y, 0, 1))));
      CHECK(close(contract(w.w_dxx, w.nodes, g, f), q.val(B.x, B.y, 2, 0), std::abs(q.val(B.x, B.y, 2, 0))));
      CHECK(close(contract(w.w_dyy, w.nodes, g, f), q.val(B.x, B.y, 0, 2), std::abs(q.val(B.x, B.y, 0, 2))));
      CHECK(close(contract(w.w_dxy, w.nodes, g, f), q.val(B.x, B.y, 1, 1), std::abs(q.val(B.x, B.y, 1, 1))));
    }
  }
}

TEST_CASE("Dirichlet ghost rows") {
  const auto c = classify(build_grid(40, -1, 1), LevelSet::circle({0, 0}, 0.2));
  const Field zero = Field::Zero(c.n_active()), one = Field::Ones(c.n_active());
  const Field q = sample(c, [](Point p) { return p.x * p.x * p.x * p.y * p.y; });
  for (const auto& gh : c.ghosts()) {
    const auto w = build_stencil(gh.node, gh.frame, c);
    CHECK(std::abs(ghost_row_dirichlet(w, c, 0.0).row.apply(zero)) == 0.0);
    const auto r1 = ghost_row_dirichlet(w, c, 1.0);
    CHECK(std::abs(r1.row.apply(one) - r1.rhs) <= 1e-14);
    const Point B = gh.frame.B;
    const auto rq = ghost_row_dirichlet(w, c, B.x * B.x * B.x * B.y * B.y);
    CHECK(std::abs(rq.row.apply(q) - rq.rhs) <= 1e-9);
  }
  const auto cs = ghost_dirichlet_constraints(c, {});
  CHECK(static_cast<int>(cs.size()) == c.n_ghost());
}

TEST_CASE("Robin ghost rows") {
  const double R = 0.2, D = 0.3, M = 0.05;
  const auto c = classify(build_grid(80, -1, 1), LevelSet::circle({0, 0}, R));
  const Field one = Field::Ones(c.n_active());
  const Field r2 = sample(c, [](Point p) { return p.x * p.x + p.y * p.y; });
  for (const auto& gh : c.ghosts()) {
    const auto w = build_stencil(gh.node, gh.frame, c);
    const SparseRow row = ghost_row_robin(w, gh.frame, c, D, M);
    CHECK(std::abs(row.apply(one)) <= 1e-9);
    // |x|^2 is a bicubic polynomial: tangential second derivative 2, normal derivative -2R
    CHECK(row.apply(r2) == doctest::Approx(D * 2 - (D / M) * (-2 * R)).epsilon(1e-9));
    // linear field along the normal at B
    const Point n = gh.frame.n;
    const Field lin = sample(c, [&](Point p) { return dot(n, p); });
    CHECK(row.apply(lin) == doctest::Approx(-D / M).epsilon(1e-9));
  }
  const auto& g0 = c.ghosts().front();
  CHECK_THROWS_AS(ghost_row_robin(build_stencil(g0.node, g0.frame, c), g0.frame, c, D, 0.0), std::invalid_argument);
}

TEST_CASE("Robin rows are assembled deterministically") {
  const auto c = classify(build_grid(48, -1, 1), LevelSet::circle({0.02, 0}, 0.25));
  const SparseMatrix L0(c.n_active(), c.n_active());
  const SparseMatrix a = add_robin_rows(L0, c, 0.01, 0.1), b = add_robin_rows(L0, c, 0.01, 0.1);
  CHECK(a.nonZeros() == b.nonZeros());
  CHECK(std::equal(a.valuePtr(), a.valuePtr() + a.nonZeros(), b.valuePtr()));
  CHECK(std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr()));
}
