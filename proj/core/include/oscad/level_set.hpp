#pragma once

#include <functional>
#include <string>
#include <variant>

#include "oscad/grid.hpp"

namespace oscad {

enum class ShapeKind { None, Circle, Ellipse, Flower, Cardioid, Custom };

std::string to_string(ShapeKind k);
ShapeKind shape_from_string(const std::string& s);

/// phi > 0 inside the obstacle, phi < 0 in the fluid, zero on the interface.
class LevelSet {
 public:
  struct NoShape {};
  struct Circle {
    Point center;
    double radius;
  };
  /// Fluid inside a sheared ellipse.
  struct Ellipse {};
  /// Fluid inside a five-petal flower.
  struct Flower {};
  /// Fluid inside a cardioid.
  struct Cardioid {};
  struct Custom {
    std::function<double(Point)> phi;
    std::function<Point(Point)> grad;  // may be empty
  };

  static LevelSet none() { return LevelSet(NoShape{}); }
  static LevelSet circle(Point center, double radius);
  static LevelSet ellipse() { return LevelSet(Ellipse{}); }
  static LevelSet flower() { return LevelSet(Flower{}); }
  static LevelSet cardioid() { return LevelSet(Cardioid{}); }
  static LevelSet custom(std::function<double(Point)> phi, std::function<Point(Point)> grad = {});

  ShapeKind kind() const;
  bool has_obstacle() const { return kind() != ShapeKind::None; }
  const Circle* as_circle() const { return std::get_if<Circle>(&shape_); }

  double phi(Point p) const;
  /// Analytic gradient when known, central differences otherwise.
  Point grad(Point p) const;

 private:
  using Shape = std::variant<NoShape, Circle, Ellipse, Flower, Cardioid, Custom>;
  explicit LevelSet(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

Point central_difference_gradient(const std::function<double(Point)>& f, Point p, double step = 1e-6);

}  // namespace oscad
