#include "svi/feasibility.hpp"

#include <cmath>

#include "svi/sampling.hpp"

namespace svi {

namespace {

// Appends <a, lhs z + rhs_const> >= 0 as  -(a^T lhs) z <= a^T rhs_const.
// Returns false if a constant row is violated (region empty).
bool append_row(PolyhedronH& h, const Vec& a, const Mat& lhs, const Vec& rhs_const) {
  const Vec normal = -(lhs.transpose() * a);
  const double offset = a.dot(rhs_const);
  if (normal.size() == 0 || normal.cwiseAbs().maxCoeff() <= 1e-14) {
    return offset >= -tol::kFeas * (1.0 + std::abs(offset));
  }
  h.add_row(normal, offset);
  return true;
}

void require_affine(const SetValuedMap& f) {
  if (!f.affine()) throw Error("nonaffine_map", "H-representation needs affine generators");
}

}  // namespace

FeasibleRegion feasible_region(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p) {
  require_affine(f);
  if (p.size() != f.param_dim()) throw Error("dim_mismatch", "parameter has wrong length");
  const int n = f.state_dim();
  PolyhedronH h(n);
  for (const AffineGenerator& g : f.generators()) {
    Vec constant = g.b;
    if (f.param_dim() > 0) constant += g.M * p;
    for (const Vec& a : c.facets()) {
      if (!append_row(h, a, g.L, constant)) return {p, PolyhedronH::infeasible(n)};
    }
  }
  return {p, std::move(h)};
}

PolyhedronH parametric_feasible_in_p(const SetValuedMap& f, const PolyhedralCone& c, const Vec& x) {
  require_affine(f);
  if (x.size() != f.state_dim()) throw Error("dim_mismatch", "state has wrong length");
  const int s = f.param_dim();
  if (s == 0) throw Error("dim_mismatch", "map has no parameter");
  PolyhedronH h(s);
  for (const AffineGenerator& g : f.generators()) {
    const Vec constant = g.L * x + g.b;
    for (const Vec& a : c.facets()) {
      if (!append_row(h, a, g.M, constant)) return PolyhedronH::infeasible(s);
    }
  }
  return h;
}

Excess excess_at(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x) {
  return excess_over_cone(eval_map(f, c, p, x), c);
}

double dist_to_feasible(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x) {
  const FeasibleRegion r = feasible_region(f, c, p);
  if (!is_feasible(r.region)) throw Error("infeasible_parameter", "S(p) is empty");
  if (r.region.contains(x, 0.0)) return 0.0;
  return project_polyhedron(r.region, x).distance;
}

std::vector<PointPX> joint_grid(std::span<const Vec> p_grid, std::span<const Vec> x_grid) {
  std::vector<PointPX> out;
  out.reserve(p_grid.size() * x_grid.size());
  for (const Vec& p : p_grid) {
    for (const Vec& x : x_grid) out.push_back({p, x});
  }
  return out;
}

ErrorBoundReport error_bound_audit(const SetValuedMap& f, const PolyhedralCone& c, double alpha,
                                   std::span<const PointPX> grid, std::optional<double> certified_alpha, double tol) {
  if (!(alpha > 1.0)) throw Error("invalid_argument", "alpha must exceed 1");
  if (certified_alpha && !(alpha < *certified_alpha)) {
    throw Error("alpha_not_certified", "alpha must lie below the certified problem constant");
  }
  ErrorBoundReport rep;
  rep.alpha = alpha;
  for (const PointPX& pt : grid) {
    const Excess e = excess_at(f, c, pt.p, pt.x);
    if (!e.unbounded && e.value <= tol::kFeas) {
      ++rep.skipped_feasible;
      continue;
    }
    ++rep.checked;
    if (e.unbounded) continue;  // the bound is vacuous
    double d = 0.0;
    try {
      d = dist_to_feasible(f, c, pt.p, pt.x);
    } catch (const Error& err) {
      rep.violations.push_back({pt.p, pt.x, std::numeric_limits<double>::infinity(), e.value, err.code()});
      continue;
    }
    rep.max_ratio = std::max(rep.max_ratio, d * (alpha - 1.0) / e.value);
    if (d > e.value / (alpha - 1.0) + tol) rep.violations.push_back({pt.p, pt.x, d, e.value, "bound_exceeded"});
  }
  return rep;
}

RegionConvexityReport convexity_of_region_audit(const SetValuedMap& f, const PolyhedralCone& c, int samples,
                                                std::uint64_t seed, double half_width) {
  Sampler rng(seed);
  RegionConvexityReport rep;
  const int s = f.param_dim();
  const int n = f.state_dim();
  auto feasible = [&](const Vec& p, const Vec& x) {
    const Excess e = excess_at(f, c, p, x);
    return !e.unbounded && e.value <= tol::kFeas;
  };
  // Draws x in S(p) by rejection; gives up after a bounded number of draws.
  auto draw_feasible = [&](const Vec& p) -> std::optional<Vec> {
    for (int k = 0; k < 200; ++k) {
      ++rep.attempts;
      Vec x = rng.box(n, half_width);
      if (feasible(p, x)) return x;
    }
    return std::nullopt;
  };

  const int max_outer = 50 * samples + 100;
  for (int outer = 0; outer < max_outer && rep.samples < samples; ++outer) {
    const Vec p1 = rng.box(s, half_width), p2 = rng.box(s, half_width);
    const auto x1 = draw_feasible(p1);
    if (!x1) continue;
    const auto x2 = draw_feasible(p2);
    if (!x2) continue;
    const double t = rng.uniform(0.0, 1.0);
    ++rep.samples;
    const Excess e = excess_at(f, c, t * p1 + (1.0 - t) * p2, t * *x1 + (1.0 - t) * *x2);
    const double ev = e.unbounded ? std::numeric_limits<double>::infinity() : e.value;
    rep.max_excess = std::max(rep.max_excess, ev);
    if (ev > tol::kFeas) rep.violations.push_back({p1, *x1, p2, *x2, t, ev});
  }
  return rep;
}

}  // namespace svi
