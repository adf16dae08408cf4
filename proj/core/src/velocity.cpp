#include "oscad/velocity.hpp"

#include <limits>

#include "oscad/errors.hpp"

namespace oscad {

std::string to_string(VelocityKind k) {
  switch (k) {
    case VelocityKind::Constant: return "constant";
    case VelocityKind::PolyCubic: return "poly_cubic";
    case VelocityKind::Radial: return "radial";
  }
  return "?";
}

VelocityKind velocity_from_string(const std::string& s) {
  if (s == "constant") return VelocityKind::Constant;
  if (s == "poly_cubic" || s == "cubic") return VelocityKind::PolyCubic;
  if (s == "radial") return VelocityKind::Radial;
  throw ConfigError("unknown velocity kind '" + s + "'");
}

Point VelocitySpec::value(Point p) const {
  switch (kind) {
    case VelocityKind::Constant: return {u, u};
    case VelocityKind::PolyCubic: return {A * p.x * p.x * p.x, A * p.y * p.y * p.y};
    case VelocityKind::Radial: {
      const double den = p.x * p.x + p.y * p.y + gamma;
      return {A * p.x / den, A * p.y / den};
    }
  }
  return {};
}

double VelocitySpec::divergence(Point p) const {
  switch (kind) {
    case VelocityKind::Constant: return 0.0;
    case VelocityKind::PolyCubic: return 3.0 * A * (p.x * p.x + p.y * p.y);
    case VelocityKind::Radial: {
      const double den = p.x * p.x + p.y * p.y + gamma;
      return 2.0 * A * gamma / (den * den);
    }
  }
  return 0.0;
}

VelocityField sample_velocity(const VelocitySpec& spec, const Classification& cls) {
  const Grid& g = cls.grid();
  VelocityField f;
  f.A = spec.A;
  f.gamma = spec.gamma;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  f.vx.assign(g.node_count(), nan);
  f.vy.assign(g.node_count(), nan);
  for (int k = 0; k < g.node_count(); ++k) {
    if (!cls.active(k)) continue;
    const Point v = spec.value(g.coordinate_of(k));
    f.vx[k] = v.x;
    f.vy[k] = v.y;
  }
  return f;
}

VelocityField uniform_velocity(const Classification& cls, double ux, double uy) {
  VelocityField f;
  f.vx.assign(cls.grid().node_count(), ux);
  f.vy.assign(cls.grid().node_count(), uy);
  return f;
}

}  // namespace oscad
