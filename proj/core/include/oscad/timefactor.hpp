#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>

namespace oscad {

enum class TimeFactorKind { Constant, Cosine };

std::string to_string(TimeFactorKind k);
TimeFactorKind time_factor_from_string(const std::string& s);

/// Scalar time factor g(t/eps) of a separable velocity.
class TimeFactor {
 public:
  static TimeFactor constant() { return TimeFactor(TimeFactorKind::Constant, 1.0); }
  /// g(t) = cos(2 pi t / eps)
  static TimeFactor cosine(double eps);

  TimeFactorKind kind() const { return kind_; }
  double epsilon() const { return eps_; }
  double operator()(double t) const;

 private:
  TimeFactor(TimeFactorKind k, double eps) : kind_(k), eps_(eps) {}
  TimeFactorKind kind_;
  double eps_;
};

/// Scalar integrals of g over one step [a,b]. Nested integrals run over a <= s <= sigma <= rho <= b,
/// with s attached to the leftmost operator of the product.
struct StepIntegrals {
  double dt = 0;
  double m0 = 0;
  double w10 = 0, w01 = 0;
  double w20 = 0, w11 = 0, w02 = 0;
  double dLQ = 0, dQL = 0, dQQ = 0;
  double tLLQ = 0, tLQL = 0, tLQQ = 0, tQLL = 0, tQLQ = 0, tQQL = 0, tQQQ = 0;

  bool operator==(const StepIntegrals&) const = default;
};

enum class StepField {
  m0, w10, w01, w20, w11, w02, dLQ, dQL, dQQ, tLLQ, tLQL, tLQQ, tQLL, tQLQ, tQQL, tQQQ
};
inline constexpr std::array<StepField, 16> kAllStepFields = {
    StepField::m0,   StepField::w10,  StepField::w01,  StepField::w20,  StepField::w11,  StepField::w02,
    StepField::dLQ,  StepField::dQL,  StepField::dQQ,  StepField::tLLQ, StepField::tLQL, StepField::tLQQ,
    StepField::tQLL, StepField::tQLQ, StepField::tQQL, StepField::tQQQ};

const char* to_string(StepField f);
double get(const StepIntegrals& s, StepField f);

/// Exact values for the shipped kinds (no quadrature).
StepIntegrals integrals_for_step(const TimeFactor& g, double a, double b);

/// Independent reference by composite Gauss-Legendre on panels no wider than eps/16.
/// Throws QuadratureError when the estimated error exceeds 1e-12 (b-a).
double quadrature_oracle(const TimeFactor& g, double a, double b, StepField which);

namespace detail {
/// Divided difference of exp at the nodes z_k = 2 pi i m_k x.
std::complex<double> dd_exp_imag(std::span<const int> m, double x);
/// Divided difference of exp at arbitrary complex nodes by its Taylor series (small |z| only).
std::complex<double> dd_exp_series(std::span<const std::complex<double>> z);
}  // namespace detail

}  // namespace oscad
