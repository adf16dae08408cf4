#pragma once

namespace oscad {

/// Adsorption length M = delta * int_0^{L+1} exp(-phi (z^-12 - 2 z^-6)) dz.
/// Throws QuadratureError when the adaptive rule cannot reach 1e-12 relative accuracy.
double compute_M(double delta, double phi, double L);

/// The same integral by double-exponential quadrature, used to cross-check compute_M.
double compute_M_tanh_sinh(double delta, double phi, double L);

}  // namespace oscad
