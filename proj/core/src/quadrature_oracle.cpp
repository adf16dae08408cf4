#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "oscad/errors.hpp"
#include "oscad/timefactor.hpp"

namespace oscad {
namespace {

constexpr int kNodes = 10;

// Gauss-Legendre rule on [-1,1] and the backward cumulative matrix
// B(q,r) = int_{x_q}^{1} l_r(t) dt for the Lagrange basis l_r on the nodes.
struct PanelRule {
  std::array<double, kNodes> x{}, w{};
  Eigen::Matrix<double, kNodes, kNodes> back;

  PanelRule() {
    using Rule = boost::math::quadrature::gauss<double, kNodes>;
    const auto& ab = Rule::abscissa();
    const auto& wt = Rule::weights();
    const int half = kNodes / 2;
    for (int k = 0; k < half; ++k) {
      x[half - 1 - k] = -ab[k];
      w[half - 1 - k] = wt[k];
      x[half + k] = ab[k];
      w[half + k] = wt[k];
    }
    // Legendre values V(q,k) = P_k(x_q) and tail integrals int_{x_q}^1 P_k
    Eigen::Matrix<double, kNodes, kNodes> V, Tail;
    for (int q = 0; q < kNodes; ++q) {
      std::array<double, kNodes + 1> P{};
      P[0] = 1.0;
      P[1] = x[q];
      for (int k = 1; k < kNodes; ++k) P[k + 1] = ((2 * k + 1) * x[q] * P[k] - k * P[k - 1]) / (k + 1);
      for (int k = 0; k < kNodes; ++k) {
        V(q, k) = P[k];
        // int_x^1 P_k = -(P_{k+1}(x) - P_{k-1}(x))/(2k+1) for k >= 1, 1 - x for k = 0
        Tail(q, k) = k == 0 ? 1.0 - x[q] : -(P[k + 1] - P[k - 1]) / (2 * k + 1);
      }
    }
    back = (V.transpose().partialPivLu().solve(Tail.transpose())).transpose();
  }
};

const PanelRule& rule() {
  static const PanelRule r;
  return r;
}

// Factor of one nesting level as a function of (local time, g value there).
using Fn = std::function<double(double, double)>;

// int_0^T f1(s) int_s^T f2 int_sigma^T f3 with panels of equal width, g(t) = gfun(t)
template <class G>
double nested(const std::vector<Fn>& f, double T, long panels, const G& gfun) {
  const PanelRule& R = rule();
  const int n = static_cast<int>(f.size());
  const double width = T / panels;
  std::array<double, 3> Zend{};  // Z_k at the right end of the current panel
  std::array<std::array<double, kNodes>, 3> Z{};
  std::array<double, kNodes> vals{}, t{}, gv{};
  for (long p = panels - 1; p >= 0; --p) {
    const double p0 = p * width;
    const double half = 0.5 * width;
    for (int q = 0; q < kNodes; ++q) {
      t[q] = p0 + half * (R.x[q] + 1.0);
      gv[q] = gfun(t[q]);
    }
    for (int k = n - 1; k >= 0; --k) {
      for (int q = 0; q < kNodes; ++q) vals[q] = f[k](t[q], gv[q]) * (k + 1 < n ? Z[k + 1][q] : 1.0);
      double total = 0.0;
      for (int q = 0; q < kNodes; ++q) {
        double s = 0.0;
        for (int r = 0; r < kNodes; ++r) s += R.back(q, r) * vals[r];
        Z[k][q] = Zend[k] + half * s;
        total += R.w[q] * vals[q];
      }
      Zend[k] += half * total;
    }
  }
  return Zend[0];
}

// Integrand factors written in the local variable s - a.
std::vector<Fn> integrand(double T, StepField which) {
  const double b = T;
  Fn G = [](double, double g) { return g; };
  Fn one = [](double, double) { return 1.0; };
  switch (which) {
    case StepField::m0: return {G};
    case StepField::w10: return {[=](double s, double g) { return (b - s) * g; }};
    case StepField::w01: return {[=](double s, double g) { return s * g; }};
    case StepField::w20: return {[=](double s, double g) { return 0.5 * (b - s) * (b - s) * g; }};
    case StepField::w11: return {[=](double s, double g) { return (b - s) * s * g; }};
    case StepField::w02: return {[=](double s, double g) { return 0.5 * s * s * g; }};
    case StepField::dLQ: return {one, G};
    case StepField::dQL: return {G, one};
    case StepField::dQQ: return {G, G};
    case StepField::tLLQ: return {one, one, G};
    case StepField::tLQL: return {one, G, one};
    case StepField::tLQQ: return {one, G, G};
    case StepField::tQLL: return {G, one, one};
    case StepField::tQLQ: return {G, one, G};
    case StepField::tQQL: return {G, G, one};
    case StepField::tQQQ: return {G, G, G};
  }
  return {};
}

}  // namespace

double quadrature_oracle(const TimeFactor& g, double a, double b, StepField which) {
  if (!(b > a)) throw std::invalid_argument("quadrature_oracle needs b > a");
  long panels = 4;
  if (g.kind() == TimeFactorKind::Cosine)
    panels = std::max<long>(panels, static_cast<long>(std::ceil((b - a) / (g.epsilon() / 16.0))));
  const double T = b - a;
  const auto f = integrand(T, which);
  // phase reduced to one period before adding the local offset
  const bool cosine = g.kind() == TimeFactorKind::Cosine;
  const double eps = g.epsilon();
  const double start = cosine ? a / eps - std::nearbyint(a / eps) : 0.0;
  auto gfun = [=](double t) { return cosine ? std::cos(2 * std::numbers::pi * (start + t / eps)) : 1.0; };
  const double tol = 1e-12 * T;
  double coarse = nested(f, T, panels, gfun);
  for (int refine = 0; refine < 4; ++refine) {
    panels *= 2;
    const double fine = nested(f, T, panels, gfun);
    if (std::abs(fine - coarse) <= tol) return fine;
    coarse = fine;
  }
  throw QuadratureError(std::string("oracle tolerance not reached for ") + to_string(which));
}

}  // namespace oscad
