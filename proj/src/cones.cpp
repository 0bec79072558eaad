#include "svi/cones.hpp"

#include <cmath>
#include <limits>

namespace svi {

PolyhedralCone::PolyhedralCone(int dim, std::vector<Vec> facets) : dim_(dim), facets_(std::move(facets)), h_(dim) {
  if (dim < 1) throw Error("dim_mismatch", "cone dimension must be positive");
  if (facets_.empty()) throw Error("cone_facets", "a cone needs at least one facet");
  for (const Vec& a : facets_) {
    if (a.size() != dim) throw Error("dim_mismatch", "facet normal has wrong length");
    if (a.norm() == 0.0) throw Error("cone_facets", "facet normals must be nonzero");
    h_.add_row(-a, 0.0);
  }
  if (dim <= 4) rays_ = to_generators(h_).rays;
}

PolyhedralCone PolyhedralCone::nonnegative_orthant(int dim) {
  std::vector<Vec> f;
  for (int i = 0; i < dim; ++i) f.push_back(Vec::Unit(dim, i));
  return PolyhedralCone(dim, std::move(f));
}

const std::vector<Vec>& PolyhedralCone::rays() const {
  if (!rays_) throw Error("rays_unavailable", "cone generators are only enumerated for dim <= 4");
  return *rays_;
}

bool PolyhedralCone::is_trivial() const {
  // C = {0} iff every coordinate is pinned to zero on C intersected with a box.
  PolyhedronH boxed = h_;
  for (int i = 0; i < dim_; ++i) {
    boxed.add_row(Vec::Unit(dim_, i), 1.0);
    boxed.add_row(-Vec::Unit(dim_, i), 1.0);
  }
  for (int i = 0; i < dim_; ++i) {
    for (double s : {1.0, -1.0}) {
      const LpResult lp = lp_solve(-s * Vec::Unit(dim_, i), boxed);
      if (lp.status == LpStatus::Optimal && -lp.value > 1e-9) return false;
    }
  }
  return true;
}

bool cone_contains(const PolyhedralCone& c, const Vec& y, double tol) {
  if (y.size() != c.dim()) throw Error("dim_mismatch", "cone query has wrong length");
  for (const Vec& a : c.facets()) {
    if (a.dot(y) < -tol) return false;
  }
  return true;
}

double dist_to_cone(const PolyhedralCone& c, const Vec& y) {
  if (cone_contains(c, y, 0.0)) return 0.0;
  return project_polyhedron(c.halfspaces(), y).distance;
}

GeneratorSet normal_cone(const PolyhedralCone& c, const Vec& y, double tol) {
  if (!cone_contains(c, y, tol * (1.0 + y.norm()))) throw Error("point_not_in_cone", "normal cone needs a point of C");
  GeneratorSet n(c.dim(), {Vec::Zero(c.dim())});
  const double thresh = tol * (1.0 + y.norm());
  for (const Vec& a : c.facets()) {
    if (std::abs(a.dot(y)) <= thresh) n.rays.push_back(-a);
  }
  return deduplicated(n);
}

Excess excess_over_cone(const GeneratorSet& s, const PolyhedralCone& c) {
  if (s.dim != c.dim()) throw Error("dim_mismatch", "set and cone differ in dimension");
  for (const Vec& r : s.rays) {
    if (!cone_contains(c, r, tol::kFeas * (1.0 + r.norm()))) {
      return {std::numeric_limits<double>::infinity(), true};
    }
  }
  double e = 0.0;
  for (const Vec& p : s.points) e = std::max(e, dist_to_cone(c, p));
  return {e, false};
}

}  // namespace svi
