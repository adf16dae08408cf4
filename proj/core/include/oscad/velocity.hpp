#pragma once

#include <string>
#include <vector>

#include "oscad/classification.hpp"

namespace oscad {

enum class VelocityKind { Constant, PolyCubic, Radial };

std::string to_string(VelocityKind k);
VelocityKind velocity_from_string(const std::string& s);

/// Spatial factor V(x) of a separable velocity u = g(t/eps) V(x).
struct VelocitySpec {
  VelocityKind kind = VelocityKind::Constant;
  double A = 1.0;
  double gamma = 0.0;
  double u = 1.0;  // constant kind: V = (u, u)

  Point value(Point p) const;
  double divergence(Point p) const;
};

/// V sampled on grid nodes. Entries at inactive nodes are NaN.
struct VelocityField {
  std::vector<double> vx, vy;
  double A = 1.0, gamma = 0.0;
};

VelocityField sample_velocity(const VelocitySpec& spec, const Classification& cls);
VelocityField uniform_velocity(const Classification& cls, double ux, double uy);

}  // namespace oscad
