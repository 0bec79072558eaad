#pragma once

// Polyhedral computation kernel: V-representations (GeneratorSet),
// H-representations (PolyhedronH), a dense simplex LP solver, membership,
// Euclidean projection, Fourier-Motzkin projection and Minkowski operations.

#include <optional>
#include <span>
#include <vector>

#include "svi/types.hpp"

namespace svi {

/// conv(points) + cone(rays). No points and no rays encodes the empty set.
struct GeneratorSet {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<Vec> rays;

  GeneratorSet() = default;
  explicit GeneratorSet(int d) : dim(d) {}
  GeneratorSet(int d, std::vector<Vec> pts, std::vector<Vec> rys = {});

  static GeneratorSet empty(int d) { return GeneratorSet(d); }
  bool is_empty() const { return points.empty() && rays.empty(); }
  bool is_bounded() const { return rays.empty(); }
};

/// {x : <normals[j], x> <= offsets[j] for all j}.
struct PolyhedronH {
  int dim = 0;
  Mat normals;  // rows are constraint normals
  Vec offsets;

  PolyhedronH() = default;
  explicit PolyhedronH(int d) : dim(d), normals(0, d), offsets(0) {}
  PolyhedronH(Mat a, Vec b);

  int rows() const { return static_cast<int>(normals.rows()); }
  void add_row(const Vec& normal, double offset);
  /// Stacks the rows of `other` (same dimension) below this system.
  void append(const PolyhedronH& other);
  bool contains(const Vec& x, double tol = tol::kFeas) const;
  /// Largest violation max_j (<a_j,x> - b_j), or -inf when there are no rows.
  double max_violation(const Vec& x) const;

  /// A canonical infeasible system in dimension d (d >= 1).
  static PolyhedronH infeasible(int d);
};

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vec point;      // optimal point (Optimal)
  Vec direction;  // recession direction with <c, d> < 0 (Unbounded)
  int iterations = 0;
};

struct LpOptions {
  int max_iterations = 0;  // 0 -> size-dependent default
};

/// min <objective, x> over region. Dense two-phase simplex, Bland's rule.
/// Throws Error("lp_stalled") if the iteration guard trips.
LpResult lp_solve(const Vec& objective, const PolyhedronH& region, const LpOptions& opts = {});

/// True when the region has at least one point.
bool is_feasible(const PolyhedronH& region);

// ---------------------------------------------------------------------------
// Membership, projection, distances
// ---------------------------------------------------------------------------

struct MembershipResult {
  bool member = false;
  double residual = 0.0;  // min over representations of ||combination - y||_inf
};

/// LP decision of y in conv(points) + cone(rays). The best-fit residual is
/// minimised in the max-norm and accepted when sqrt(dim) * residual <= tol,
/// which implies Euclidean residual <= tol. Empty set -> non-member.
MembershipResult membership(const GeneratorSet& set, const Vec& y, double tol = tol::kMember);
bool member(const GeneratorSet& set, const Vec& y, double tol = tol::kMember);

struct Projection {
  Vec point;
  double distance = 0.0;
  int sweeps = 0;
};

/// Euclidean projection by Dykstra's alternating projections over the
/// half-spaces, followed by an exact active-set correction when the
/// multiplier pattern is consistent. Throws Error("empty_region").
Projection project_polyhedron(const PolyhedronH& region, const Vec& x);

/// Euclidean distance from y to conv(points) (Wolfe's minimum-norm-point).
double distance_to_hull(std::span<const Vec> points, const Vec& y);

/// Hausdorff distance between two polytopes given by their point generators.
double hausdorff_distance(const GeneratorSet& a, const GeneratorSet& b);

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

/// Orthogonal projection of `system` onto the coordinates in `keep` (in that
/// order). Throws Error("fm_dim_exceeded") above tol::kFmMaxDim.
PolyhedronH fm_project(const PolyhedronH& system, std::span<const int> keep);

/// H-representation of conv(points) + cone(rays) via Fourier-Motzkin.
PolyhedronH halfspaces_of(const GeneratorSet& set);

/// V-representation of a polyhedron of dimension <= 4 by support enumeration.
/// Lineality directions are returned as pairs of opposite rays.
/// Throws Error("enumeration_dim_exceeded") above dimension 4.
GeneratorSet to_generators(const PolyhedronH& region);

/// Basis (columns) of the null space of `a`, with relative rank threshold.
Mat null_space(const Mat& a, double rel_tol = 1e-10);

// ---------------------------------------------------------------------------
// Minkowski operations
// ---------------------------------------------------------------------------

/// t*A + (1-t)*B. Points are the pairwise scaled sums, rays the union
/// (rays of a set with weight 0 are dropped, so t = 1 returns A).
GeneratorSet minkowski_scale_sum(const GeneratorSet& a, const GeneratorSet& b, double t);

/// A + B.
GeneratorSet minkowski_sum(const GeneratorSet& a, const GeneratorSet& b);

/// A + cone(rays).
GeneratorSet add_rays(const GeneratorSet& a, std::span<const Vec> rays);

/// Removes duplicate points and positively parallel duplicate rays.
GeneratorSet deduplicated(const GeneratorSet& set, double tol = 1e-12);

}  // namespace svi
