#include "svi/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "svi/sampling.hpp"

namespace svi {

const char* to_string(Qualification q) {
  return q == Qualification::PolyhedralCertified ? "polyhedral_certified" : "unverified";
}

GeneratorSet objective_subdiff(const ConvexObjective& phi, const Vec& p, const Vec& x, double tol) {
  const int s = phi.param_dim(), n = phi.state_dim();
  const double top = phi.max_affine(p, x);
  Vec shift = phi.quadratic_gradient(p, x);
  GeneratorSet out(s + n);
  for (std::size_t k = 0; k < phi.pieces().size(); ++k) {
    if (phi.piece_value(k, p, x) < top - tol * (1.0 + std::abs(top))) continue;
    const AffinePiece& pc = phi.pieces()[k];
    Vec g(s + n);
    g << pc.g_p, pc.g_x;
    out.points.push_back(g + shift);
  }
  return deduplicated(out);
}

std::vector<std::size_t> active_generators(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x,
                                           double tol) {
  const std::size_t count = f.generators().size();
  if (count == 0) throw Error("empty_fan", "map has no generators");
  std::vector<double> dist(count);
  for (std::size_t i = 0; i < count; ++i) dist[i] = dist_to_cone(c, f.image(i, p, x));
  const double top = *std::max_element(dist.begin(), dist.end());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < count; ++i) {
    if (dist[i] >= top - tol * (1.0 + top)) active.push_back(i);
  }
  return active;
}

GeneratorSet coderivative_cone(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x) {
  const Excess e = excess_at(f, c, p, x);
  if (e.unbounded || e.value > 1e-8 * (1.0 + x.norm())) {
    throw Error("not_a_solution_point", "x is not feasible for p");
  }
  const int s = f.param_dim(), n = f.state_dim();
  GeneratorSet out(s + n, {Vec::Zero(s + n)});
  for (std::size_t i : active_generators(f, c, p, x)) {
    const AffineGenerator& g = f.generators()[i];
    Vec image = f.image(i, p, x);
    // Round-off can leave a feasible image a hair outside C.
    if (!cone_contains(c, image)) image = project_polyhedron(c.halfspaces(), image).point;
    for (const Vec& u : normal_cone(c, image).rays) {
      Vec ray(s + n);
      ray << g.M.transpose() * u, g.L.transpose() * u;
      if (ray.norm() > 1e-14) out.rays.push_back(ray);
    }
  }
  return deduplicated(out);
}

Qualification qualification_check(const ProblemInstance& inst) {
  if (inst.objective.polyhedral() && inst.map.affine()) return Qualification::PolyhedralCertified;
  return Qualification::Unverified;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_equality(PolyhedronH& h, const Vec& row, double rhs) {
  h.add_row(row, rhs);
  h.add_row(-row, -rhs);
}

// Variables (w, nu, mu): w - sum nu P_k - sum mu Q_r = 0,  sum mu X_r + sum nu
// Y_k = 0,  sum nu = 1,  nu, mu >= 0, where the objective subgradients are
// (P_k, Y_k) and the coderivative rays (Q_r, X_r).
PolyhedronH assemble_joint_system(const GeneratorSet& obj, const GeneratorSet& cone, int s, int n) {
  const int kn = static_cast<int>(obj.points.size());
  const int kr = static_cast<int>(cone.rays.size());
  const int dim = s + kn + kr;
  PolyhedronH h(dim);
  for (int i = 0; i < s; ++i) {
    Vec row = Vec::Zero(dim);
    row(i) = 1.0;
    for (int k = 0; k < kn; ++k) row(s + k) = -obj.points[k](i);
    for (int r = 0; r < kr; ++r) row(s + kn + r) = -cone.rays[r](i);
    add_equality(h, row, 0.0);
  }
  for (int j = 0; j < n; ++j) {
    Vec row = Vec::Zero(dim);
    for (int k = 0; k < kn; ++k) row(s + k) = obj.points[k](s + j);
    for (int r = 0; r < kr; ++r) row(s + kn + r) = cone.rays[r](s + j);
    add_equality(h, row, 0.0);
  }
  Vec sum = Vec::Zero(dim);
  sum.segment(s, kn).setOnes();
  add_equality(h, sum, 1.0);
  for (int k = s; k < dim; ++k) h.add_row(-Vec::Unit(dim, k), 0.0);
  return h;
}

// Support value max <d, w> over the joint system, +inf when unbounded,
// nullopt when the system is empty.
std::optional<double> support(const PolyhedronH& sys, const Vec& d) {
  Vec obj = Vec::Zero(sys.dim);
  obj.head(d.size()) = -d;
  const LpResult lp = lp_solve(obj, sys);
  if (lp.status == LpStatus::Infeasible) return std::nullopt;
  if (lp.status == LpStatus::Unbounded) return kInf;
  return d.dot(lp.point.head(d.size()));
}

std::optional<bool> argmin_is_unique(const ProblemInstance& inst, const Vec& p, double value) {
  if (!inst.objective.polyhedral()) return std::nullopt;
  const int n = inst.n();
  const PolyhedronH region = feasible_region(inst.map, inst.cone, p).region;
  PolyhedronH level(n);
  level.append(region);
  const double slack = 1e-9 * (1.0 + std::abs(value));
  for (const AffinePiece& pc : inst.objective.pieces()) level.add_row(pc.g_x, value + slack - pc.g_p.dot(p) - pc.c);
  for (int k = 0; k < n; ++k) {
    const LpResult lo = lp_solve(Vec::Unit(n, k), level);
    const LpResult hi = lp_solve(-Vec::Unit(n, k), level);
    if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal) return false;
    if (hi.point(k) - lo.point(k) > 1e-7) return false;
  }
  return true;
}

void finish_from_halfspaces(SubdiffReport& rep, int s) {
  if (s <= 4) {
    rep.value_subdiff = to_generators(*rep.value_subdiff_halfspaces);
  } else {
    rep.value_subdiff = GeneratorSet(s);
    rep.notes.push_back("generators_unavailable_above_dim_4");
  }
}

}  // namespace

SubdiffReport value_subdiff(const ProblemInstance& inst, const Vec& p_bar, const SubdiffOptions& opts) {
  SubdiffReport rep;
  rep.p_bar = p_bar;
  rep.qualification = qualification_check(inst);
  if (rep.qualification == Qualification::Unverified) {
    if (!opts.allow_unverified) throw Error("qualification_unverified", "pass allow_unverified to proceed");
    rep.notes.push_back("qualification_unverified_override");
  }
  const SolveReport sol = solve(inst, p_bar);
  if (sol.status != SolveStatus::Optimal) throw Error("not_optimal", std::string("solve status ") + to_string(sol.status));
  rep.x_bar = sol.argmin;
  rep.argmin_unique = argmin_is_unique(inst, p_bar, sol.value);
  if (rep.argmin_unique == false) rep.notes.push_back("argmin_not_singleton: formula evaluated at the solver's point");

  const int s = inst.s(), n = inst.n();
  rep.objective_subdiff = objective_subdiff(inst.objective, p_bar, rep.x_bar);
  rep.coderivative_cone = coderivative_cone(inst.map, inst.cone, p_bar, rep.x_bar);
  const PolyhedronH sys = assemble_joint_system(rep.objective_subdiff, rep.coderivative_cone, s, n);

  if (s == 1) {
    rep.mode = "exact";
    const auto hi = support(sys, Vec::Constant(1, 1.0));
    const auto lo = support(sys, Vec::Constant(1, -1.0));
    GeneratorSet set(1);
    PolyhedronH h(1);
    if (!hi || !lo) {
      rep.value_subdiff = set;
      rep.value_subdiff_halfspaces = PolyhedronH::infeasible(1);
      return rep;
    }
    const double upper = *hi, lower = -*lo;
    if (std::isfinite(upper)) h.add_row(Vec::Constant(1, 1.0), upper);
    if (std::isfinite(lower)) h.add_row(Vec::Constant(1, -1.0), -lower);
    if (std::isfinite(lower)) set.points.push_back(Vec::Constant(1, lower));
    if (std::isfinite(upper) && (!std::isfinite(lower) || upper - lower > 1e-12)) {
      set.points.push_back(Vec::Constant(1, upper));
    }
    if (set.points.empty()) set.points.push_back(Vec::Zero(1));
    if (!std::isfinite(upper)) set.rays.push_back(Vec::Constant(1, 1.0));
    if (!std::isfinite(lower)) set.rays.push_back(Vec::Constant(1, -1.0));
    rep.value_subdiff = set;
    rep.value_subdiff_halfspaces = h;
    return rep;
  }

  if (sys.dim <= tol::kFmMaxDim) {
    rep.mode = "exact";
    std::vector<int> keep(s);
    std::iota(keep.begin(), keep.end(), 0);
    rep.value_subdiff_halfspaces = fm_project(sys, keep);
    finish_from_halfspaces(rep, s);
    return rep;
  }

  rep.mode = "outer";
  Sampler rng(opts.seed);
  std::vector<Vec> dirs;
  for (int k = 0; k < s; ++k) {
    dirs.push_back(Vec::Unit(s, k));
    dirs.push_back(-Vec::Unit(s, k));
  }
  for (int k = 0; k < opts.support_directions; ++k) dirs.push_back(rng.unit(s));
  PolyhedronH h(s);
  for (const Vec& d : dirs) {
    const auto val = support(sys, d);
    if (!val) {
      h = PolyhedronH::infeasible(s);
      break;
    }
    if (std::isfinite(*val)) h.add_row(d, *val);
  }
  rep.value_subdiff_halfspaces = h;
  finish_from_halfspaces(rep, s);
  return rep;
}

OracleInterval subdiff_oracle_1d(const ProblemInstance& inst, double p_bar, double h0, double shrink, int steps) {
  if (inst.s() != 1) throw Error("dim_mismatch", "oracle needs a scalar parameter");
  if (!(h0 > 0.0) || !(shrink > 0.0 && shrink < 1.0) || steps < 1) {
    throw Error("invalid_argument", "need h0 > 0, 0 < shrink < 1, steps >= 1");
  }
  auto val = [&](double p) {
    const SolveReport r = solve(inst, Vec::Constant(1, p));
    if (r.status != SolveStatus::Optimal) throw Error("oracle_probe_failed", "probe at p = " + std::to_string(p));
    return r.value;
  };
  OracleInterval out;
  const double v0 = val(p_bar);
  double prev_up = kInf, prev_down = -kInf;
  double h = h0;
  for (int k = 0; k < steps; ++k, h *= shrink) {
    const double up = (val(p_bar + h) - v0) / h;
    const double down = (v0 - val(p_bar - h)) / h;
    out.probes += 2;
    const double slack = 1e-9 * (1.0 + std::abs(up) + std::abs(down));
    // Convexity: forward quotients shrink and backward quotients grow as h -> 0.
    if (up > prev_up + slack || down < prev_down - slack || down > up + slack) out.monotone = false;
    prev_up = up;
    prev_down = down;
  }
  out.upper = prev_up;
  out.lower = prev_down;
  return out;
}

}  // namespace svi
