#include "oscad/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

using CSparse = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor, int>;
using RealLU = Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>>;
using ComplexLU = Eigen::SparseLU<CSparse, Eigen::COLAMDOrdering<int>>;

// Masked L and Q merged on a common row pattern so every pass reads the indices once.
struct FusedPair {
  int n = 0;
  std::vector<int> ptr, col;
  std::vector<double> l, q;

  FusedPair(const SparseMatrix& L, const SparseMatrix& Q) : n(static_cast<int>(L.rows())) {
    ptr.assign(n + 1, 0);
    std::vector<std::pair<int, std::pair<double, double>>> row;
    for (int r = 0; r < n; ++r) {
      row.clear();
      for (SparseMatrix::InnerIterator it(L, r); it; ++it) row.push_back({it.col(), {it.value(), 0.0}});
      for (SparseMatrix::InnerIterator it(Q, r); it; ++it) row.push_back({it.col(), {0.0, it.value()}});
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (!col.empty() && static_cast<int>(col.size()) > ptr[r] && col.back() == row[k].first) {
          l.back() += row[k].second.first;
          q.back() += row[k].second.second;
        } else {
          col.push_back(row[k].first);
          l.push_back(row[k].second.first);
          q.push_back(row[k].second.second);
        }
      }
      ptr[r + 1] = static_cast<int>(col.size());
    }
  }

  void pass2(const double* x, double* Lx, double* Qx) const {
    for (int r = 0; r < n; ++r) {
      double sl = 0.0, sq = 0.0;
      for (int k = ptr[r]; k < ptr[r + 1]; ++k) {
        const double v = x[col[k]];
        sl += l[k] * v;
        sq += q[k] * v;
      }
      Lx[r] = sl;
      Qx[r] = sq;
    }
  }

  void pass4(const double* a, const double* b, double* La, double* Lb, double* Qa, double* Qb) const {
    for (int r = 0; r < n; ++r) {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (int k = ptr[r]; k < ptr[r + 1]; ++k) {
        const double va = a[col[k]], vb = b[col[k]];
        s0 += l[k] * va;
        s1 += l[k] * vb;
        s2 += q[k] * va;
        s3 += q[k] * vb;
      }
      La[r] = s0;
      Lb[r] = s1;
      Qa[r] = s2;
      Qb[r] = s3;
    }
  }

  // out = L p + Q q
  void combo(const double* p, const double* qv, double* out) const {
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int k = ptr[r]; k < ptr[r + 1]; ++k) s += l[k] * p[col[k]] + q[k] * qv[col[k]];
      out[r] = s;
    }
  }
};

bool identity_rows(const ConstraintSet& cs) {
  for (std::size_t k = 0; k < cs.rows.size(); ++k) {
    const auto& r = cs.coeffs[k];
    if (r.cols.size() != 1 || r.cols[0] != cs.rows[k] || r.vals[0] != 1.0) return false;
  }
  return true;
}

// Integrals scaled by the matching power of dt, for change detection.
std::array<double, 16> normalized(const StepIntegrals& s) {
  std::array<double, 16> v{};
  for (std::size_t k = 0; k < kAllStepFields.size(); ++k) {
    const StepField f = kAllStepFields[k];
    const int level = k == 0 ? 1 : (k <= 2 || (k >= 6 && k <= 8) ? 2 : 3);
    v[k] = get(s, f) / std::pow(s.dt, level);
  }
  return v;
}

}  // namespace

std::vector<std::complex<double>> truncated_exp_roots(int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("order must be 1, 2 or 3");
  // companion matrix of the monic polynomial z^p + ... with p(z) = sum (-z)^k / k!
  std::vector<double> c(order + 1);
  double f = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) f *= k;
    c[k] = (k % 2 ? -1.0 : 1.0) / f;
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < order; ++i) C(i, order - 1) = -c[i] / c[order];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  std::vector<std::complex<double>> roots(es.eigenvalues().data(), es.eigenvalues().data() + order);
  // real root first, then the pair with positive imaginary part
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return std::abs(a.imag()) < std::abs(b.imag()) || (std::abs(a.imag()) == std::abs(b.imag()) && a.imag() > b.imag()); });
  return roots;
}

StepOperator assemble_A(int order, const SparseMatrix& L, const SparseMatrix& Q, const StepIntegrals& s,
                        const ConstraintSet& cs) {
  if (order < 1 || order > 3) throw std::invalid_argument("order must be 1, 2 or 3");
  if (L.rows() != Q.rows() || L.rows() != L.cols()) throw std::invalid_argument("L and Q must be square and equal size");
  const int n = static_cast<int>(L.rows());
  const SparseMatrix Lm = mask_rows(L, cs.mask);
  const SparseMatrix Qm = mask_rows(Q, cs.mask);
  const double dt = s.dt;
  SparseMatrix A = identity(n) - dt * Lm - s.m0 * Qm;
  if (order >= 2) {
    const SparseMatrix LL = Lm * Lm, LQ = Lm * Qm, QL = Qm * Lm, QQ = Qm * Qm;
    A += 0.5 * dt * dt * LL + s.dLQ * LQ + s.dQL * QL + s.dQQ * QQ;
    if (order >= 3) {
      const SparseMatrix P = (dt * dt * dt / 6.0) * LL + s.tLLQ * LQ + s.tLQL * QL + s.tLQQ * QQ;
      const SparseMatrix R = s.tQLL * LL + s.tQLQ * LQ + s.tQQL * QL + s.tQQQ * QQ;
      A -= SparseMatrix(Lm * P) + SparseMatrix(Qm * R);
    }
  }
  A.prune(0.0);
  StepOperator op;
  op.order = order;
  op.integrals = s;
  op.constraint_rows = cs.rows;
  op.A = replace_rows(A, cs.rows, cs.coeffs);
  return op;
}

Field step(const StepOperator& A, const Field& c_n, const Field& rhs_bc) {
  RealLU lu;
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> Ac = A.A;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success) throw SolverError("step operator factorization failed: " + lu.lastErrorMessage());
  Field x = lu.solve(c_n + rhs_bc);
  if (lu.info() != Eigen::Success) throw SolverError("step operator solve failed");
  return x;
}

struct Integrator::Impl {
  SemiDiscrete sys;
  TimeFactor g;
  int order;
  SolverOptions opt;
  SparseMatrix Lm, Qm;
  FusedPair fused;
  double normL, normQ;
  bool plain_constraints;
  std::unique_ptr<RealLU> constraint_lu;  // C = I with constraint rows replaced

  // assembled-matrix preconditioner
  std::unique_ptr<RealLU> assembled_lu;
  std::array<double, 16> assembled_key{};
  double assembled_dt = -1.0;
  // polynomial-root preconditioner
  std::vector<std::unique_ptr<RealLU>> real_factors;
  std::vector<std::unique_ptr<ComplexLU>> complex_factors;
  std::vector<std::complex<double>> complex_shift;
  double roots_dt = -1.0;
  double roots_mean = 0.0;   // m0 / dt the factors were built with
  double roots_failed_dt = -1.0;  // this dt needs the assembled factorization despite its size

  mutable Field u, v, LL, LQ, QL, QQ, p, q, z;
  Field prev;
  double prev_dt = -1.0;
  double prev_t = 0.0;
  int last_iterations = 0;
  double escalated_dt = -1.0;

  Impl(const SemiDiscrete& s, TimeFactor gg, int ord, SolverOptions o)
      : sys(s),
        g(gg),
        order(ord),
        opt(o),
        Lm(mask_rows(s.L, s.constraints.mask)),
        Qm(mask_rows(s.Q, s.constraints.mask)),
        fused(Lm, Qm),
        normL(inf_norm(Lm)),
        normQ(inf_norm(Qm)),
        plain_constraints(identity_rows(s.constraints)) {
    const int n = s.size();
    for (Field* f : {&u, &v, &LL, &LQ, &QL, &QQ, &p, &q, &z}) f->resize(n);
    if (!plain_constraints) {
      const SparseMatrix C = replace_rows(identity(n), s.constraints.rows, s.constraints.coeffs);
      constraint_lu = std::make_unique<RealLU>();
      constraint_lu->compute(Eigen::SparseMatrix<double, Eigen::ColMajor, int>(C));
      if (constraint_lu->info() != Eigen::Success) throw SolverError("constraint rows are singular");
    }
  }

  double coupling(const StepIntegrals& s) const {
    const double dt = s.dt, a = normL, b = normQ;
    double eta = dt * a + std::abs(s.m0) * b;
    if (order >= 2) eta += 0.5 * dt * dt * a * a + (std::abs(s.dLQ) + std::abs(s.dQL)) * a * b + std::abs(s.dQQ) * b * b;
    if (order >= 3)
      eta += dt * dt * dt / 6 * a * a * a + (std::abs(s.tLLQ) + std::abs(s.tLQL) + std::abs(s.tQLL)) * a * a * b +
             (std::abs(s.tLQQ) + std::abs(s.tQLQ) + std::abs(s.tQQL)) * a * b * b + std::abs(s.tQQQ) * b * b * b;
    return eta;
  }

  void apply(const StepIntegrals& s, const Field& x, Field& y) const {
    const double dt = s.dt;
    fused.pass2(x.data(), u.data(), v.data());
    y = x - dt * u - s.m0 * v;
    if (order >= 2) {
      fused.pass4(u.data(), v.data(), LL.data(), LQ.data(), QL.data(), QQ.data());
      y += 0.5 * dt * dt * LL + s.dLQ * LQ + s.dQL * QL + s.dQQ * QQ;
      if (order >= 3) {
        p = (dt * dt * dt / 6.0) * LL + s.tLLQ * LQ + s.tLQL * QL + s.tLQQ * QQ;
        q = s.tQLL * LL + s.tQLQ * LQ + s.tQQL * QL + s.tQQQ * QQ;
        fused.combo(p.data(), q.data(), z.data());
        y -= z;
      }
    }
    const auto& cs = sys.constraints;
    for (std::size_t k = 0; k < cs.rows.size(); ++k) y[cs.rows[k]] = cs.coeffs[k].apply(x);
  }

  void constraint_solve(Field& x) const {
    if (constraint_lu) x = constraint_lu->solve(x);
  }

  void build_assembled(const StepIntegrals& s, SolverStats& st) {
    const StepOperator op = assemble_A(order, sys.L, sys.Q, s, sys.constraints);
    assembled_lu = std::make_unique<RealLU>();
    assembled_lu->compute(Eigen::SparseMatrix<double, Eigen::ColMajor, int>(op.A));
    if (assembled_lu->info() != Eigen::Success)
      throw SolverError("step operator is singular for dt = " + std::to_string(s.dt));
    assembled_key = normalized(s);
    assembled_dt = s.dt;
    ++st.factorizations;
  }

  // Factors of p(dt L + m0 Q), exact when g is constant and close to A otherwise.
  void build_roots(double dt, double mean, SolverStats& st) {
    real_factors.clear();
    complex_factors.clear();
    complex_shift.clear();
    const int n = sys.size();
    const auto roots = truncated_exp_roots(order);
    const SparseMatrix G = mean == 0.0 ? Lm : SparseMatrix(Lm + mean * Qm);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const auto r = roots[k];
      if (std::abs(r.imag()) < 1e-12) {
        Eigen::SparseMatrix<double, Eigen::ColMajor, int> F = identity(n) - (dt / r.real()) * G;
        auto lu = std::make_unique<RealLU>();
        lu->compute(F);
        if (lu->info() != Eigen::Success) throw SolverError("preconditioner factor is singular");
        real_factors.push_back(std::move(lu));
      } else if (r.imag() > 0) {
        CSparse F = identity(n).cast<std::complex<double>>() - (dt / r) * G.cast<std::complex<double>>();
        auto lu = std::make_unique<ComplexLU>();
        lu->compute(F);
        if (lu->info() != Eigen::Success) throw SolverError("preconditioner factor is singular");
        complex_factors.push_back(std::move(lu));
        complex_shift.push_back(dt / r);
      }
      ++st.factorizations;
    }
    roots_dt = dt;
    roots_mean = mean;
  }

  void apply_roots(const Field& in, Field& out) const {
    out = in;
    for (const auto& lu : real_factors) out = lu->solve(out);
    // for real x, [(I - aL)(I - conj(a)L)]^-1 x = Im(a y) / Im(a) with y = (I - aL)^-1 x
    for (std::size_t k = 0; k < complex_factors.size(); ++k) {
      const std::complex<double> a = complex_shift[k];
      const Eigen::VectorXcd y = complex_factors[k]->solve(out.cast<std::complex<double>>());
      out = (a * y).imag() / a.imag();
    }
    constraint_solve(out);
  }
};

Integrator::Integrator(const SemiDiscrete& sys, TimeFactor g, int order, SolverOptions opt) : order_(order) {
  if (order < 1 || order > 3) throw std::invalid_argument("order must be 1, 2 or 3");
  if (sys.L.rows() != sys.Q.rows()) throw std::invalid_argument("L and Q sizes differ");
  if (static_cast<int>(sys.constraints.mask.size()) != sys.size() && !sys.constraints.rows.empty())
    throw std::invalid_argument("constraint mask size mismatch");
  SemiDiscrete copy = sys;
  if (copy.constraints.mask.empty()) copy.constraints.mask.assign(copy.size(), 0);
  impl_ = std::make_unique<Impl>(copy, g, order, opt);
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;

void Integrator::apply(const StepIntegrals& s, const Field& x, Field& y) const {
  y.resize(x.size());
  impl_->apply(s, x, y);
}

Field Integrator::advance(const Field& c, double t, double dt) {
  Impl& im = *impl_;
  const StepIntegrals s = integrals_for_step(im.g, t, t + dt);
  Field b = c;
  const auto& cs = im.sys.constraints;
  const auto vals = cs.values(t + dt);
  for (std::size_t k = 0; k < cs.rows.size(); ++k) b[cs.rows[k]] = vals[k];

  const int n = im.sys.size();
  const bool small = n <= im.opt.direct_limit;
  SolverKind kind = im.opt.kind;
  if (kind == SolverKind::Auto) kind = SolverKind::Krylov;

  if (kind == SolverKind::Direct) {
    if (!im.assembled_lu || im.assembled_dt != dt || normalized(s) != im.assembled_key) im.build_assembled(s, stats_);
    Field x = im.assembled_lu->solve(b);
    Field r(n);
    im.apply(s, x, r);
    const double res = (b - r).norm() / std::max(b.norm(), 1e-300);
    stats_.max_residual = std::max(stats_.max_residual, res);
    ++stats_.steps;
    return x;
  }

  const bool auto_kind = im.opt.kind == SolverKind::Auto;
  auto use_assembled = [&] { return auto_kind && (small || im.roots_failed_dt == dt); };
  auto preconditioner = [&](bool factored) -> LinearMap {
    if (factored && use_assembled()) {
      bool stale = !im.assembled_lu || im.assembled_dt != dt;
      if (!stale) {
        const auto key = normalized(s);
        double diff = 0.0;
        for (std::size_t k = 0; k < key.size(); ++k) diff = std::max(diff, std::abs(key[k] - im.assembled_key[k]));
        // a slightly stale factorization is still a good preconditioner
        stale = diff > 1e-8 && im.last_iterations > 8;
      }
      if (stale) im.build_assembled(s, stats_);
      return [&im](const Field& in, Field& out) { out = im.assembled_lu->solve(in); };
    }
    if (factored) {
      const double mean = s.m0 / dt;
      const bool stale = im.roots_dt != dt || (std::abs(mean - im.roots_mean) > 1e-8 && im.last_iterations > 8);
      if (stale) im.build_roots(dt, mean, stats_);
      return [&im](const Field& in, Field& out) { im.apply_roots(in, out); };
    }
    if (im.constraint_lu)
      return [&im](const Field& in, Field& out) {
        out = in;
        im.constraint_solve(out);
      };
    return {};
  };

  const double eta = im.coupling(s);
  const bool factored = eta > im.opt.weak_coupling || im.escalated_dt == dt;
  Field x = c;
  if (im.opt.extrapolate_guess && im.prev.size() == n && im.prev_dt == dt && std::abs(im.prev_t + dt - t) <= 1e-12 * std::max(1.0, std::abs(t)))
    x = 2.0 * c - im.prev;
  LinearMap Aop = [&im, &s](const Field& in, Field& out) { im.apply(s, in, out); };
  GmresResult gr;
  if (!factored) {
    // the plain attempt gets a short budget, then the step is retried with the factored preconditioner
    GmresOptions plain = im.opt.gmres;
    plain.max_iter = std::min(plain.max_iter, 2 * im.opt.escalate_iterations);
    gr = gmres(Aop, preconditioner(false), b, x, plain);
    if (gr.iterations > im.opt.escalate_iterations) im.escalated_dt = dt;
  }
  // With the assembled factors a stall means either a stale factorization or an A so ill-conditioned
  // that the tolerance sits below the floating point floor. Refactoring for this very step and starting
  // from the direct solution settles both: GMRES then only has to reach what the direct solve achieved.
  auto assembled_stage = [&](int spent) {
    GmresOptions capped = im.opt.gmres;
    capped.max_iter = std::min(capped.max_iter, im.opt.escalate_iterations);
    GmresResult r = gmres(Aop, preconditioner(true), b, x, capped);
    if (!r.converged) {
      spent += r.iterations;
      im.build_assembled(s, stats_);
      x = im.assembled_lu->solve(b);
      Field ax(n);
      im.apply(s, x, ax);
      GmresOptions o = im.opt.gmres;
      o.tol = std::max(o.tol, 2 * (b - ax).norm() / std::max(b.norm(), 1e-300));
      r = gmres(Aop, preconditioner(true), b, x, o);
    }
    r.iterations += spent;
    return r;
  };

  if (factored || !gr.converged) {
    const int spent = factored ? 0 : gr.iterations;
    if (use_assembled()) {
      gr = assembled_stage(spent);
    } else {
      // The root factors drop the commutators of L and Q, which are not small at every step size.
      // When they stall, this dt moves to the assembled factorization whatever the size.
      GmresOptions capped = im.opt.gmres;
      if (auto_kind) capped.max_iter = std::min(capped.max_iter, 10 * im.opt.escalate_iterations);
      gr = gmres(Aop, preconditioner(true), b, x, capped);
      if (!gr.converged && auto_kind) {
        im.roots_failed_dt = dt;
        gr = assembled_stage(spent + gr.iterations);
      } else {
        gr.iterations += spent;
      }
    }
  }
  if (!gr.converged) {
    std::ostringstream os;
    os << "GMRES did not converge at t = " << t << " (dt = " << dt << ", residual " << gr.residual << " after "
       << gr.iterations << " iterations)";
    throw SolverError(os.str());
  }
  stats_.iterations += gr.iterations;
  im.last_iterations = gr.iterations;
  stats_.max_residual = std::max(stats_.max_residual, gr.residual);
  ++stats_.steps;
  im.prev = c;
  im.prev_dt = dt;
  im.prev_t = t;
  return x;
}

Field Integrator::evolve(Field c, double t0, double t_fin, long n_steps,
                         const std::function<void(long, double, const Field&)>& observer) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  if (observer) observer(0, t0, c);
  if (n_steps == 0) return c;
  const double dt = (t_fin - t0) / n_steps;
  for (long k = 0; k < n_steps; ++k) {
    const double t = t0 + k * dt;
    c = advance(c, t, dt);
    if (observer) observer(k + 1, t0 + (k + 1) * dt, c);
  }
  return c;
}

std::vector<Snapshot> evolve(const SemiDiscrete& sys, const Field& c0, const EvolveConfig& cfg) {
  Integrator integ(sys, cfg.g, cfg.order, cfg.solver);
  std::vector<Snapshot> out;
  integ.evolve(c0, cfg.t0, cfg.t_fin, cfg.n_steps, [&](long k, double t, const Field& c) {
    if (k == 0 || k == cfg.n_steps || (cfg.stride > 0 && k % cfg.stride == 0)) out.push_back({k, t, c});
  });
  return out;
}

}  // namespace oscad
