#pragma once

#include <optional>
#include <vector>

#include "svi/poly_kernel.hpp"

namespace svi {

/// C = {y : <a_j, y> >= 0 for all facets a_j}.
///
/// Generators (extreme rays plus both orientations of any lineality
/// direction) are enumerated at construction for dim <= 4; above that
/// `rays()` throws Error("rays_unavailable").
class PolyhedralCone {
 public:
  PolyhedralCone() = default;
  PolyhedralCone(int dim, std::vector<Vec> facets);

  static PolyhedralCone nonnegative_orthant(int dim);

  int dim() const { return dim_; }
  const std::vector<Vec>& facets() const { return facets_; }
  bool has_rays() const { return rays_.has_value(); }
  const std::vector<Vec>& rays() const;

  /// The cone as the H-system {y : -<a_j, y> <= 0}.
  const PolyhedronH& halfspaces() const { return h_; }

  /// Diagnostic for the degenerate case C = {0} (not an invariant).
  bool is_trivial() const;

 private:
  int dim_ = 0;
  std::vector<Vec> facets_;
  PolyhedronH h_;
  std::optional<std::vector<Vec>> rays_;
};

bool cone_contains(const PolyhedralCone& c, const Vec& y, double tol = tol::kFeas);

double dist_to_cone(const PolyhedralCone& c, const Vec& y);

/// cone{-a_j : j active at y}, activity |<a_j,y>| <= tol * (1 + |y|).
/// Throws Error("point_not_in_cone").
GeneratorSet normal_cone(const PolyhedralCone& c, const Vec& y, double tol = tol::kActive);

struct Excess {
  double value = 0.0;
  bool unbounded = false;  // a ray of the set leaves C: value is +inf
};

/// exc(S, C) = sup_{s in S} dist(s, C). For conv(points) + cone(rays in C)
/// the sup is attained at a point generator because dist(., C) is convex.
Excess excess_over_cone(const GeneratorSet& s, const PolyhedralCone& c);

}  // namespace svi
