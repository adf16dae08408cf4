#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "oscad/gmres.hpp"
#include "oscad/operators.hpp"
#include "oscad/sparse.hpp"
#include "oscad/timefactor.hpp"

namespace oscad {

/// dc/dt = L c + g(t) Q c on time-evolution rows, W c = f(t) on constraint rows.
struct SemiDiscrete {
  SparseMatrix L;
  SparseMatrix Q;
  ConstraintSet constraints;

  int size() const { return static_cast<int>(L.rows()); }
};

/// Explicitly assembled step matrix, mainly for tests and small systems.
struct StepOperator {
  int order = 1;
  SparseMatrix A;
  StepIntegrals integrals;
  std::vector<int> constraint_rows;
};

/// A^1 = I - dt L - m0 Q, plus the second and third order corrections. Products use L and Q
/// with constraint rows zeroed; constraint rows of the result are the constraint equations.
StepOperator assemble_A(int order, const SparseMatrix& L, const SparseMatrix& Q, const StepIntegrals& s,
                        const ConstraintSet& constraints);

/// Solves A c = c_n + rhs_bc by sparse LU.
Field step(const StepOperator& A, const Field& c_n, const Field& rhs_bc);

enum class SolverKind { Auto, Direct, Krylov };

struct SolverOptions {
  SolverKind kind = SolverKind::Auto;
  GmresOptions gmres{};
  /// Systems up to this size may be preconditioned by an LU of the assembled step matrix.
  int direct_limit = 10000;
  /// Below this bound on ||A - I|| the Krylov solve starts without the factored preconditioner.
  double weak_coupling = 100.0;
  /// An unpreconditioned step needing more iterations than this switches the run to the factored one.
  int escalate_iterations = 30;
  bool extrapolate_guess = true;
};

struct SolverStats {
  long steps = 0;
  long iterations = 0;
  long factorizations = 0;
  double max_residual = 0.0;
};

/// Time stepper of order 1..3 for a fixed semi-discrete system.
class Integrator {
 public:
  Integrator(const SemiDiscrete& sys, TimeFactor g, int order, SolverOptions opt = {});
  ~Integrator();
  Integrator(Integrator&&) noexcept;

  /// One step from t to t + dt.
  Field advance(const Field& c, double t, double dt);
  /// n_steps uniform steps; observer(k, t_k, c_k) sees the initial state and every step.
  Field evolve(Field c0, double t0, double t_fin, long n_steps,
               const std::function<void(long, double, const Field&)>& observer = {});

  /// y = A x for the step with the given integrals (constraint rows included).
  void apply(const StepIntegrals& s, const Field& x, Field& y) const;

  const SolverStats& stats() const { return stats_; }
  int order() const { return order_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int order_;
  SolverStats stats_;
};

struct Snapshot {
  long step;
  double t;
  Field c;
};

struct EvolveConfig {
  int order = 3;
  TimeFactor g = TimeFactor::constant();
  double t0 = 0.0;
  double t_fin = 0.1;
  long n_steps = 10;
  long stride = 0;  // 0 keeps only the final state
  SolverOptions solver{};
};

/// Runs the integrator and returns the initial state, every stride-th state and the final state.
std::vector<Snapshot> evolve(const SemiDiscrete& sys, const Field& c0, const EvolveConfig& cfg);

/// Coefficients of p(z) = sum_{k<=order} (-z)^k / k! written as prod (1 - z / r_k).
std::vector<std::complex<double>> truncated_exp_roots(int order);

}  // namespace oscad
