#include "oscad/level_set.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oscad/errors.hpp"

namespace oscad {
namespace {

constexpr double kCos6 = 0.86602540378443864676;  // cos(pi/6)
constexpr double kSin6 = 0.5;

struct EllipseParams {
  static constexpr double a = 0.7, b = 0.45;
  static double x0() { return std::sqrt(2.0) / 20.0; }
  static double y0() { return std::sqrt(3.0) / 30.0; }
};

double ellipse_phi(Point p) {
  const double X = kCos6 * p.x - kSin6 * p.y - EllipseParams::x0();
  const double Y = kCos6 * p.x + kSin6 * p.y - EllipseParams::y0();
  return X * X / (EllipseParams::a * EllipseParams::a) + Y * Y / (EllipseParams::b * EllipseParams::b) - 1.0;
}

Point ellipse_grad(Point p) {
  const double X = kCos6 * p.x - kSin6 * p.y - EllipseParams::x0();
  const double Y = kCos6 * p.x + kSin6 * p.y - EllipseParams::y0();
  const double fx = 2.0 * X / (EllipseParams::a * EllipseParams::a);
  const double fy = 2.0 * Y / (EllipseParams::b * EllipseParams::b);
  return {kCos6 * (fx + fy), kSin6 * (fy - fx)};
}

// Five-fold flower r = 0.52 + sin(5 theta)/5 written in Cartesian form.
Point flower_shift(Point p) { return {p.x - 0.03 * std::sqrt(3.0), p.y - 0.04 * std::sqrt(2.0)}; }

double flower_phi(Point p) {
  const Point q = flower_shift(p);
  const double X = q.x, Y = q.y;
  const double R = std::hypot(X, Y);
  const double P = std::pow(Y, 5) + 5 * std::pow(X, 4) * Y - 10 * X * X * std::pow(Y, 3);
  return R - 0.52 - P / (5.0 * std::pow(R, 5));
}

Point flower_grad(Point p) {
  const Point q = flower_shift(p);
  const double X = q.x, Y = q.y;
  const double R = std::hypot(X, Y);
  const double P = std::pow(Y, 5) + 5 * std::pow(X, 4) * Y - 10 * X * X * std::pow(Y, 3);
  const double PX = 20 * std::pow(X, 3) * Y - 20 * X * std::pow(Y, 3);
  const double PY = 5 * std::pow(Y, 4) + 5 * std::pow(X, 4) - 30 * X * X * Y * Y;
  const double R5 = std::pow(R, 5), R7 = std::pow(R, 7);
  return {X / R - (PX / (5 * R5) - P * X / R7), Y / R - (PY / (5 * R5) - P * Y / R7)};
}

Point cardioid_shift(Point p) {
  return {p.x - 0.04 * std::sqrt(3.0) + 0.35, p.y - 0.05 * std::sqrt(2.0)};
}

double cardioid_phi(Point p) {
  const Point q = cardioid_shift(p);
  const double r2 = q.x * q.x + q.y * q.y;
  const double t = 3.0 * r2 - q.x;
  return t * t - r2;
}

Point cardioid_grad(Point p) {
  const Point q = cardioid_shift(p);
  const double t = 3.0 * (q.x * q.x + q.y * q.y) - q.x;
  return {2.0 * t * (6.0 * q.x - 1.0) - 2.0 * q.x, 2.0 * t * 6.0 * q.y - 2.0 * q.y};
}

}  // namespace

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::None: return "none";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Ellipse: return "ellipse";
    case ShapeKind::Flower: return "flower";
    case ShapeKind::Cardioid: return "cardioid";
    case ShapeKind::Custom: return "custom";
  }
  return "unknown";
}

ShapeKind shape_from_string(const std::string& s) {
  if (s == "none" || s.empty()) return ShapeKind::None;
  if (s == "circle") return ShapeKind::Circle;
  if (s == "ellipse") return ShapeKind::Ellipse;
  if (s == "flower") return ShapeKind::Flower;
  if (s == "cardioid") return ShapeKind::Cardioid;
  throw ConfigError("unknown shape '" + s + "'");
}

LevelSet LevelSet::circle(Point center, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("circle radius must be positive");
  return LevelSet(Circle{center, radius});
}

LevelSet LevelSet::custom(std::function<double(Point)> phi, std::function<Point(Point)> grad) {
  if (!phi) throw std::invalid_argument("custom level set needs phi");
  return LevelSet(Custom{std::move(phi), std::move(grad)});
}

ShapeKind LevelSet::kind() const {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoShape>) return ShapeKind::None;
        if constexpr (std::is_same_v<T, Circle>) return ShapeKind::Circle;
        if constexpr (std::is_same_v<T, Ellipse>) return ShapeKind::Ellipse;
        if constexpr (std::is_same_v<T, Flower>) return ShapeKind::Flower;
        if constexpr (std::is_same_v<T, Cardioid>) return ShapeKind::Cardioid;
        if constexpr (std::is_same_v<T, Custom>) return ShapeKind::Custom;
      },
      shape_);
}

double LevelSet::phi(Point p) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoShape>) return -1.0;
        if constexpr (std::is_same_v<T, Circle>) return s.radius - norm(p - s.center);
        if constexpr (std::is_same_v<T, Ellipse>) return ellipse_phi(p);
        if constexpr (std::is_same_v<T, Flower>) return flower_phi(p);
        if constexpr (std::is_same_v<T, Cardioid>) return cardioid_phi(p);
        if constexpr (std::is_same_v<T, Custom>) return s.phi(p);
      },
      shape_);
}

Point LevelSet::grad(Point p) const {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoShape>) return {0.0, 0.0};
        if constexpr (std::is_same_v<T, Circle>) {
          const Point d = p - s.center;
          const double r = norm(d);
          if (r == 0.0) return {0.0, 0.0};
          return {-d.x / r, -d.y / r};
        }
        if constexpr (std::is_same_v<T, Ellipse>) return ellipse_grad(p);
        if constexpr (std::is_same_v<T, Flower>) return flower_grad(p);
        if constexpr (std::is_same_v<T, Cardioid>) return cardioid_grad(p);
        if constexpr (std::is_same_v<T, Custom>) {
          if (s.grad) return s.grad(p);
          return central_difference_gradient(s.phi, p);
        }
      },
      shape_);
}

Point central_difference_gradient(const std::function<double(Point)>& f, Point p, double step) {
  return {(f({p.x + step, p.y}) - f({p.x - step, p.y})) / (2 * step),
          (f({p.x, p.y + step}) - f({p.x, p.y - step})) / (2 * step)};
}

}  // namespace oscad
