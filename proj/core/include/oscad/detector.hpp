#pragma once

#include "oscad/classification.hpp"
#include "oscad/sparse.hpp"

namespace oscad {

/// Bicubic interpolation of an active-unknown field at P from the surrounding 4x4 block of fluid nodes.
/// Throws GeometryError if P lies in the obstacle or no fluid block surrounds it.
double probe(const Classification& cls, const Field& c, Point P);

}  // namespace oscad
