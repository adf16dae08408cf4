#include "oscad/gmres.hpp"

#include <cmath>
#include <vector>

namespace oscad {

GmresResult gmres(const LinearMap& A, const LinearMap& Pinv, const Field& b, Field& x, const GmresOptions& opt) {
  const Eigen::Index n = b.size();
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const int m = opt.restart;
  // basis vectors are sized on first use; most solves need only a few
  std::vector<Field> V(m + 1), Z(m);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);
  Field r(n), w(n);

  auto true_residual = [&]() {
    A(x, w);
    r = b - w;
    return r.norm() / bnorm;
  };

  double rel = true_residual();
  while (true) {
    if (rel <= opt.tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opt.max_iter) break;
    const double beta = r.norm();
    V[0] = r / beta;
    g.setZero();
    g[0] = beta;
    int k = 0;
    for (; k < m && res.iterations < opt.max_iter; ++k) {
      ++res.iterations;
      Z[k].resize(n);
      if (Pinv)
        Pinv(V[k], Z[k]);
      else
        Z[k] = V[k];
      A(Z[k], w);
      // modified Gram-Schmidt with one reorthogonalization pass
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double hik = V[i].dot(w);
          H(i, k) += hik;
          w -= hik * V[i];
        }
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) V[k + 1] = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double den = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = den == 0.0 ? 1.0 : H(k, k) / den;
      sn[k] = den == 0.0 ? 0.0 : H(k + 1, k) / den;
      H(k, k) = den;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= opt.tol * bnorm * 0.5 || den == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution on the k x k triangle
    Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) x += y[i] * Z[i];
    H.setZero();
    const double prev = rel;
    rel = true_residual();
    if (rel >= prev && rel > opt.tol) {
      // stagnation: no progress over a whole cycle
      if (res.iterations >= opt.max_iter || k == 0) break;
    }
  }
  res.residual = rel;
  return res;
}

}  // namespace oscad
