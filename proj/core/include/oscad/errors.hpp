#pragma once

#include <stdexcept>
#include <string>

namespace oscad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid too coarse for a shape, failed projections, bad stencils.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Linear solve failed or the step operator is numerically singular.
class SolverError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace oscad
