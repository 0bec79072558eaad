#pragma once

// The two reference instances, built directly in code (no JSON involved).

#include "svi/instance.hpp"

namespace svi::test {

inline Mat m11(double v) { return Mat::Constant(1, 1, v); }
inline Vec v1(double v) { return Vec::Constant(1, v); }

/// F(p,x) = conv{-p + x, -p + 2x}, C = [0, inf), phi = |p| + x.
inline ProblemInstance worked_example() {
  SetValuedMap f = SetValuedMap::fan({{m11(-1), m11(1), v1(0)}, {m11(-1), m11(2), v1(0)}});
  ConvexObjective phi({{v1(1), v1(1), 0.0}, {v1(-1), v1(1), 0.0}});
  return ProblemInstance(std::move(phi), std::move(f), PolyhedralCone::nonnegative_orthant(1));
}

/// F(p,x) = (p - x) + [0, inf), phi = p + x.
inline ProblemInstance first_example() {
  SetValuedMap f = SetValuedMap::affine_plus_cone(m11(1), m11(-1), v1(0));
  ConvexObjective phi({{v1(1), v1(1), 0.0}});
  return ProblemInstance(std::move(phi), std::move(f), PolyhedralCone::nonnegative_orthant(1));
}

}  // namespace svi::test
