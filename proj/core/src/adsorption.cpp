#include "oscad/adsorption.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

void check(double delta, double L) {
  if (!(delta > 0.0)) throw std::invalid_argument("compute_M needs delta > 0");
  if (!(L > 0.0)) throw std::invalid_argument("compute_M needs L > 0");
}

// exp(-U) with U the nondimensional Lennard-Jones potential; zero where U overflows
double boltzmann(double phi, double z) {
  if (z <= 0.0) return 0.0;
  const double s = std::pow(z, -6.0);
  const double U = phi * s * (s - 2.0);
  if (!std::isfinite(U)) return 0.0;
  return std::exp(-U);
}

}  // namespace

double compute_M(double delta, double phi, double L) {
  check(delta, L);
  if (phi == 0.0) return delta * (L + 1.0);
  auto f = [phi](double z) { return boltzmann(phi, z); };
  double err = 0.0;
  // the well sits at z = 1; splitting there keeps both pieces smooth
  const double left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-13, &err);
  double err2 = 0.0;
  const double right = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 1.0, L + 1.0, 20, 1e-13, &err2);
  const double I = left + right;
  if (!(err + err2 <= 1e-12 * std::abs(I))) throw QuadratureError("compute_M: quadrature tolerance not reached");
  return delta * I;
}

double compute_M_tanh_sinh(double delta, double phi, double L) {
  check(delta, L);
  if (phi == 0.0) return delta * (L + 1.0);
  auto f = [phi](double z) { return boltzmann(phi, z); };
  boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  const double left = rule.integrate(f, 0.0, 1.0, 1e-14, &err);
  const double right = rule.integrate(f, 1.0, L + 1.0, 1e-14, &err);
  return delta * (left + right);
}

}  // namespace oscad
