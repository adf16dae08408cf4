#include "oscad/mms.hpp"

#include <cmath>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

struct Gauss {
  double v, x, y, xx, yy;  // value and derivatives
};

Gauss gauss_derivs(Point c, double s, double x, double y) {
  const double dx = x - c.x, dy = y - c.y, s2 = s * s;
  const double v = std::exp(-(dx * dx + dy * dy) / (2 * s2));
  return {v, -dx / s2 * v, -dy / s2 * v, (dx * dx / s2 - 1.0) / s2 * v, (dy * dy / s2 - 1.0) / s2 * v};
}

}  // namespace

double gaussian(Point center, double sigma, Point p) { return gauss_derivs(center, sigma, p.x, p.y).v; }

double exact_solution(const ManufacturedCase& mc, double x, double y, double t) {
  if (mc.zero) return 0.0;
  if (!(mc.sigma > 0)) throw std::invalid_argument("sigma must be positive");
  return std::cos(t) * gauss_derivs(mc.center1, mc.sigma, x, y).v +
         std::sin(t) * gauss_derivs(mc.center2, mc.sigma, x, y).v;
}

double forcing(const ManufacturedCase& mc, double x, double y, double t) {
  if (mc.zero) return 0.0;
  const Gauss g1 = gauss_derivs(mc.center1, mc.sigma, x, y);
  const Gauss g2 = gauss_derivs(mc.center2, mc.sigma, x, y);
  const double ct = std::cos(t), st = std::sin(t);
  const double c = ct * g1.v + st * g2.v;
  const double dt = -st * g1.v + ct * g2.v;
  const double cx = ct * g1.x + st * g2.x, cy = ct * g1.y + st * g2.y;
  const double lap = ct * (g1.xx + g1.yy) + st * (g2.xx + g2.yy);
  double adv;
  if (mc.form == AdvectionForm::Constant) {
    const double u = mc.velocity.u;
    adv = u * (cx + cy);
  } else {
    const Point p{x, y};
    const Point V = mc.velocity.value(p);
    adv = c * mc.velocity.divergence(p) + V.x * cx + V.y * cy;
  }
  return dt - mc.D * lap - adv;
}

Field sample(const Classification& cls, const std::function<double(Point)>& f) {
  Field v(cls.n_active());
  for (int k = 0; k < cls.n_active(); ++k) v[k] = f(cls.grid().coordinate_of(cls.node_of(k)));
  return v;
}

CrankNicolson::CrankNicolson(const SparseMatrix& op, const ConstraintSet& cs, double dt)
    : constraints_(cs), dt_(dt) {
  const int n = static_cast<int>(op.rows());
  const SparseMatrix Om = mask_rows(op, cs.mask);
  rhs_op_ = identity(n) + 0.5 * dt * Om;
  const SparseMatrix lhs = replace_rows(SparseMatrix(identity(n) - 0.5 * dt * Om), cs.rows, cs.coeffs);
  lu_.compute(Eigen::SparseMatrix<double, Eigen::ColMajor, int>(lhs));
  if (lu_.info() != Eigen::Success) throw SolverError("Crank-Nicolson matrix is singular");
}

Field CrankNicolson::step(const Field& c, const Field& F_n, const Field& F_np1, double t_np1) const {
  Field b = rhs_op_ * c + 0.5 * dt_ * (F_n + F_np1);
  const auto vals = constraints_.values(t_np1);
  for (std::size_t k = 0; k < constraints_.rows.size(); ++k) b[constraints_.rows[k]] = vals[k];
  Field x = lu_.solve(b);
  if (lu_.info() != Eigen::Success) throw SolverError("Crank-Nicolson solve failed");
  return x;
}

Field cn_forced_step(const SparseMatrix& op, const Field& c_n, const Field& F_n, const Field& F_np1, double dt) {
  ConstraintSet none;
  none.mask.assign(op.rows(), 0);
  return CrankNicolson(op, none, dt).step(c_n, F_n, F_np1, 0.0);
}

ErrorNorms error_norms(const Field& num, const Field& ref) {
  if (num.size() != ref.size()) throw std::invalid_argument("error_norms: size mismatch");
  const Field d = num - ref;
  const double r1 = ref.lpNorm<1>(), r2 = ref.norm(), ri = ref.lpNorm<Eigen::Infinity>();
  if (r1 == 0.0) throw std::invalid_argument("error_norms: reference has zero norm");
  return {d.lpNorm<1>() / r1, d.norm() / r2, d.lpNorm<Eigen::Infinity>() / ri};
}

}  // namespace oscad
