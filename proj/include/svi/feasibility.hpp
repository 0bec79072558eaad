#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svi/maps.hpp"

namespace svi {

/// S(p) = {x : F(p, x) in C} as an H-system over x.
struct FeasibleRegion {
  Vec p;
  PolyhedronH region;
};

/// A polytope lies in the convex cone C iff its vertices do, and
/// g + C is in C iff g is; both reduce to <a_j, M_i p + L_i x + b_i> >= 0.
/// Throws Error("nonaffine_map") for hooked maps.
FeasibleRegion feasible_region(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p);

/// {p : F(p, x) in C} for fixed x.
PolyhedronH parametric_feasible_in_p(const SetValuedMap& f, const PolyhedralCone& c, const Vec& x);

/// exc(F(p,x), C).
Excess excess_at(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x);

/// dist(x, S(p)). Throws Error("infeasible_parameter") when S(p) is empty.
double dist_to_feasible(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x);

struct PointPX {
  Vec p;
  Vec x;
};

struct ErrorBoundViolation {
  Vec p, x;
  double distance = 0.0;
  double excess = 0.0;
  std::string reason;
};

struct ErrorBoundReport {
  double alpha = 0.0;
  double max_ratio = 0.0;  // max of dist * (alpha - 1) / exc
  int checked = 0;
  int skipped_feasible = 0;
  std::vector<ErrorBoundViolation> violations;
};

/// Checks dist(x, S(p)) <= exc(F(p,x), C) / (alpha - 1) + tol on every grid
/// point with positive excess. If `certified_alpha` is given, alpha must be
/// below it (Error("alpha_not_certified")).
ErrorBoundReport error_bound_audit(const SetValuedMap& f, const PolyhedralCone& c, double alpha,
                                   std::span<const PointPX> grid, std::optional<double> certified_alpha = std::nullopt,
                                   double tol = 1e-7);

/// Grid (p, x) as the product of a p-grid and an x-grid.
std::vector<PointPX> joint_grid(std::span<const Vec> p_grid, std::span<const Vec> x_grid);

struct RegionConvexitySample {
  Vec p1, x1, p2, x2;
  double t = 0.0;
  double excess = 0.0;  // excess at the combined point
};

struct RegionConvexityReport {
  int samples = 0;       // accepted pairs
  int attempts = 0;      // total rejection-sampling draws
  double max_excess = 0.0;
  std::vector<RegionConvexitySample> violations;
};

/// Samples p1, p2 in the box, x_i in S(p_i) by rejection, t in [0,1], and
/// checks t x1 + (1-t) x2 in S(t p1 + (1-t) p2). Membership is decided by the
/// excess, so hooked (non-affine) maps are supported.
RegionConvexityReport convexity_of_region_audit(const SetValuedMap& f, const PolyhedralCone& c, int samples,
                                                std::uint64_t seed, double half_width = 2.0);

}  // namespace svi
