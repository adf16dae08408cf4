#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oscad/timefactor.hpp"

namespace oscad::detail {
namespace {

using cplx = std::complex<double>;

// exp(2 pi i y) with the argument reduced in cycles first
cplx cis_cycles(double y) {
  const double f = y - std::nearbyint(y);
  const double a = 2.0 * std::numbers::pi * f;
  return {std::cos(a), std::sin(a)};
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

cplx dd_exp_series(std::span<const cplx> z) {
  const int n = static_cast<int>(z.size()) - 1;
  if (n < 0) throw std::invalid_argument("divided difference needs at least one node");
  // h_k(z_0..z_n), complete homogeneous polynomials, built one variable at a time
  constexpr int K = 80;
  std::vector<cplx> h(K + 1, cplx(0.0));
  h[0] = 1.0;
  for (int k = 1; k <= K; ++k) h[k] = h[k - 1] * z[0];
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= K; ++k) h[k] += z[j] * h[k - 1];
  double r = 0.0;
  for (const cplx& v : z) r = std::max(r, std::abs(v));
  double fact = 1.0;  // (n+k)!
  for (int i = 2; i <= n; ++i) fact *= i;
  cplx sum = h[0] / fact;
  // |h_k| <= C(n+k, k) r^k, so the tail after k is below r^k / (n! k!); single terms
  // can vanish exactly (odd k on node sets symmetric about 0) and are no stopping signal
  double tail = 1.0;
  for (int k = 1; k <= K; ++k) {
    fact *= (n + k);
    sum += h[k] / fact;
    tail *= r / k;
    if (tail <= 1e-18) break;
  }
  return sum;
}

cplx dd_exp_imag(std::span<const int> m, double x) {
  const int count = static_cast<int>(m.size());
  int mmax = 0;
  for (int v : m) mmax = std::max(mmax, std::abs(v));
  const double two_pi = 2.0 * std::numbers::pi;
  if (two_pi * std::abs(x) * mmax <= 3.0) {
    std::vector<cplx> z(count);
    for (int k = 0; k < count; ++k) z[k] = cplx(0.0, two_pi * m[k] * x);
    return dd_exp_series(z);
  }
  // confluent partial fractions over the distinct nodes
  std::vector<int> value, mult;
  for (int v : m) {
    auto it = std::find(value.begin(), value.end(), v);
    if (it == value.end()) {
      value.push_back(v);
      mult.push_back(1);
    } else {
      ++mult[it - value.begin()];
    }
  }
  cplx total = 0.0;
  for (std::size_t j = 0; j < value.size(); ++j) {
    const int R = mult[j] - 1;
    std::vector<cplx> s(R + 1);
    const cplx ey = cis_cycles(value[j] * x);
    double qf = 1.0;
    for (int q = 0; q <= R; ++q) {
      if (q > 0) qf *= q;
      s[q] = ey / qf;
    }
    for (std::size_t k = 0; k < value.size(); ++k) {
      if (k == j) continue;
      const cplx d(0.0, two_pi * (value[j] - value[k]) * x);
      const int r = mult[k];
      std::vector<cplx> f(R + 1);
      const cplx base = std::pow(d, -r);
      cplx dq = 1.0;
      for (int q = 0; q <= R; ++q) {
        const double c = (q % 2 ? -1.0 : 1.0) * binom(r + q - 1, q);
        f[q] = base * c / dq;
        dq *= d;
      }
      std::vector<cplx> prod(R + 1, cplx(0.0));
      for (int p = 0; p <= R; ++p)
        for (int q = 0; p + q <= R; ++q) prod[p + q] += s[p] * f[q];
      s.swap(prod);
    }
    total += s[R];
  }
  return total;
}

}  // namespace oscad::detail
