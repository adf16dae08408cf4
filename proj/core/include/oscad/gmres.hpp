#pragma once

#include <functional>

#include "oscad/sparse.hpp"

namespace oscad {

using LinearMap = std::function<void(const Field& in, Field& out)>;

struct GmresOptions {
  double tol = 1e-13;  // relative residual ||b - Ax|| / ||b||
  int restart = 60;
  int max_iter = 2000;
};

struct GmresResult {
  int iterations = 0;
  double residual = 0.0;  // relative, recomputed from the true residual
  bool converged = false;
};

/// Restarted GMRES with right preconditioning; x holds the initial guess on entry.
GmresResult gmres(const LinearMap& A, const LinearMap& Pinv, const Field& b, Field& x, const GmresOptions& opt);

}  // namespace oscad
