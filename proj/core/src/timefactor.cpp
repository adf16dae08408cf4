#include "oscad/timefactor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

using cplx = std::complex<double>;

// Iterated integral over a <= s_1 <= ... <= s_n <= b of prod f_k(s_k), f_k = g if use_g[k] else 1.
double simplex(const TimeFactor& g, double a, double b, std::span<const bool> use_g) {
  const int n = static_cast<int>(use_g.size());
  const double T = b - a;
  if (g.kind() == TimeFactorKind::Constant) {
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= T / k;
    return v;
  }
  const double eps = g.epsilon();
  const double x = T / eps;        // step length in periods
  const double phase = a / eps;    // start time in periods
  int ng = 0;
  for (bool u : use_g) ng += u;
  // cos = (e^{+} + e^{-})/2 on every g factor
  cplx sum = 0.0;
  std::array<int, 4> nodes{};
  for (int mask = 0; mask < (1 << ng); ++mask) {
    std::array<int, 3> sigma{};
    int bit = 0, total = 0;
    for (int k = 0; k < n; ++k) {
      sigma[k] = use_g[k] ? ((mask >> bit++) & 1 ? -1 : 1) : 0;
      total += sigma[k];
    }
    // nodes 0, Lambda_n, ..., Lambda_1 with Lambda_j the suffix sums
    nodes[0] = 0;
    int suffix = 0;
    for (int k = n - 1, p = 1; k >= 0; --k, ++p) {
      suffix += sigma[k];
      nodes[p] = suffix;
    }
    const double cyc = total * phase - std::nearbyint(total * phase);
    const cplx rot(std::cos(2 * std::numbers::pi * cyc), std::sin(2 * std::numbers::pi * cyc));
    sum += rot * detail::dd_exp_imag(std::span<const int>(nodes.data(), n + 1), x);
  }
  return std::pow(T, n) * std::ldexp(sum.real(), -ng);
}

double S1(const TimeFactor& g, double a, double b) {
  const bool u[] = {true};
  return simplex(g, a, b, u);
}
double S2(const TimeFactor& g, double a, double b, bool f1, bool f2) {
  const bool u[] = {f1, f2};
  return simplex(g, a, b, u);
}
double S3(const TimeFactor& g, double a, double b, bool f1, bool f2, bool f3) {
  const bool u[] = {f1, f2, f3};
  return simplex(g, a, b, u);
}

}  // namespace

std::string to_string(TimeFactorKind k) { return k == TimeFactorKind::Constant ? "constant" : "cosine"; }

TimeFactorKind time_factor_from_string(const std::string& s) {
  if (s == "constant") return TimeFactorKind::Constant;
  if (s == "cosine") return TimeFactorKind::Cosine;
  throw ConfigError("unknown time factor '" + s + "'");
}

TimeFactor TimeFactor::cosine(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return TimeFactor(TimeFactorKind::Cosine, eps);
}

double TimeFactor::operator()(double t) const {
  if (kind_ == TimeFactorKind::Constant) return 1.0;
  const double c = t / eps_ - std::nearbyint(t / eps_);
  return std::cos(2 * std::numbers::pi * c);
}

const char* to_string(StepField f) {
  static const char* names[] = {"m0",   "w10",  "w01",  "w20",  "w11",  "w02",  "dLQ",  "dQL",
                                "dQQ",  "tLLQ", "tLQL", "tLQQ", "tQLL", "tQLQ", "tQQL", "tQQQ"};
  return names[static_cast<int>(f)];
}

double get(const StepIntegrals& s, StepField f) {
  switch (f) {
    case StepField::m0: return s.m0;
    case StepField::w10: return s.w10;
    case StepField::w01: return s.w01;
    case StepField::w20: return s.w20;
    case StepField::w11: return s.w11;
    case StepField::w02: return s.w02;
    case StepField::dLQ: return s.dLQ;
    case StepField::dQL: return s.dQL;
    case StepField::dQQ: return s.dQQ;
    case StepField::tLLQ: return s.tLLQ;
    case StepField::tLQL: return s.tLQL;
    case StepField::tLQQ: return s.tLQQ;
    case StepField::tQLL: return s.tQLL;
    case StepField::tQLQ: return s.tQLQ;
    case StepField::tQQL: return s.tQQL;
    case StepField::tQQQ: return s.tQQQ;
  }
  return 0.0;
}

StepIntegrals integrals_for_step(const TimeFactor& g, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("integrals_for_step needs b > a");
  StepIntegrals s;
  s.dt = b - a;
  s.m0 = S1(g, a, b);
  s.w10 = S2(g, a, b, true, false);
  s.w01 = S2(g, a, b, false, true);
  s.w20 = S3(g, a, b, true, false, false);
  s.w11 = S3(g, a, b, false, true, false);
  s.w02 = S3(g, a, b, false, false, true);
  s.dQL = s.w10;
  s.dLQ = s.w01;
  s.dQQ = S2(g, a, b, true, true);
  s.tLLQ = s.w02;
  s.tLQL = s.w11;
  s.tQLL = s.w20;
  s.tLQQ = S3(g, a, b, false, true, true);
  s.tQLQ = S3(g, a, b, true, false, true);
  s.tQQL = S3(g, a, b, true, true, false);
  s.tQQQ = S3(g, a, b, true, true, true);
  return s;
}

}  // namespace oscad
