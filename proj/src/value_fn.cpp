#include "svi/value_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace svi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolveReport infeasible_report(const Vec& p, SolvePath path) {
  SolveReport r;
  r.p = p;
  r.status = SolveStatus::Infeasible;
  r.value = kInf;
  r.path = path;
  return r;
}

SolveReport solve_lp(const ProblemInstance& inst, const Vec& p, const PolyhedronH& region) {
  const ConvexObjective& phi = inst.objective;
  const int n = inst.n();
  PolyhedronH epi(n + 1);
  for (const AffinePiece& pc : phi.pieces()) {
    Vec row(n + 1);
    row << pc.g_x, -1.0;
    epi.add_row(row, -(pc.g_p.dot(p) + pc.c));
  }
  for (int j = 0; j < region.rows(); ++j) {
    Vec row(n + 1);
    row << region.normals.row(j).transpose(), 0.0;
    epi.add_row(row, region.offsets(j));
  }
  Vec obj = Vec::Zero(n + 1);
  obj(n) = 1.0;
  const LpResult lp = lp_solve(obj, epi);

  SolveReport r;
  r.p = p;
  r.path = SolvePath::Lp;
  r.iterations = lp.iterations;
  switch (lp.status) {
    case LpStatus::Infeasible:
      return infeasible_report(p, SolvePath::Lp);
    case LpStatus::Unbounded: {
      r.status = SolveStatus::Unbounded;
      r.value = -kInf;
      Vec d = lp.direction.head(n);
      const double nd = d.norm();
      if (nd > 0.0) r.certificate = d / nd;
      return r;
    }
    case LpStatus::Optimal:
      r.status = SolveStatus::Optimal;
      r.argmin = lp.point.head(n);
      r.value = phi(p, r.argmin);
      return r;
  }
  return r;
}

Vec x_subgradient(const ConvexObjective& phi, const Vec& p, const Vec& x) {
  const auto& pieces = phi.pieces();
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double v = phi.piece_value(k, p, x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  Vec g = pieces[best].g_x;
  if (phi.quadratic()) g += phi.quadratic_gradient(p, x).tail(x.size());
  return g;
}

SolveReport solve_subgradient(const ProblemInstance& inst, const Vec& p, const PolyhedronH& region,
                              const SolveOptions& opts) {
  const ConvexObjective& phi = inst.objective;
  const int n = inst.n();
  auto project = [&](const Vec& y) { return region.contains(y, 0.0) ? y : project_polyhedron(region, y).point; };

  SolveReport r;
  r.p = p;
  r.path = SolvePath::Subgradient;

  Vec x = project(opts.start ? *opts.start : Vec::Zero(n));
  const double c = 1.0 + std::abs(phi(p, x));
  Vec best = x;
  double best_val = phi(p, x);
  Vec avg = Vec::Zero(n);
  double weight = 0.0;
  double window_start_val = best_val;
  constexpr int kWindow = 1000;

  int k = 1;
  for (; k <= opts.max_iterations; ++k) {
    const Vec g = x_subgradient(phi, p, x);
    const double gn = g.norm();
    if (gn < 1e-14) break;  // unconstrained minimiser
    const double step = c / std::sqrt(static_cast<double>(k));
    const Vec next = project(x - (step / gn) * g);
    if (next.norm() > 1e8) {
      r.status = SolveStatus::Unbounded;
      r.value = -kInf;
      r.iterations = k;
      r.note = "suspected";
      return r;
    }
    const bool fixed = (next - x).norm() <= 1e-13 * (1.0 + x.norm());
    x = next;
    avg += step * x;
    weight += step;
    const double v = phi(p, x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
    if (fixed) break;  // -g lies in the normal cone: x is optimal
    if (k % kWindow == 0) {
      if (window_start_val - best_val <= opts.tolerance * (1.0 + std::abs(best_val))) break;
      window_start_val = best_val;
    }
  }
  if (k > opts.max_iterations) {
    r.note = "iteration_cap";
    k = opts.max_iterations;
  }
  if (weight > 0.0) {
    const Vec mean = avg / weight;  // convex combination of feasible points
    if (phi(p, mean) < best_val) {
      best = mean;
      best_val = phi(p, mean);
    }
  }
  r.status = SolveStatus::Optimal;
  r.argmin = best;
  r.value = best_val;
  r.iterations = k;
  return r;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::Infeasible:
      return "Infeasible";
  }
  return "?";
}

SolveReport solve(const ProblemInstance& inst, const Vec& p, const SolveOptions& opts) {
  const FeasibleRegion fr = feasible_region(inst.map, inst.cone, p);
  const bool lp_path = inst.objective.polyhedral() && !opts.force_subgradient;
  if (lp_path) return solve_lp(inst, p, fr.region);
  if (!is_feasible(fr.region)) return infeasible_report(p, SolvePath::Subgradient);
  return solve_subgradient(inst, p, fr.region, opts);
}

std::vector<SolveReport> value_grid(const ProblemInstance& inst, std::span<const Vec> p_grid, const SolveOptions& opts,
                                    bool parallel) {
  std::vector<SolveReport> rows(p_grid.size());
  const unsigned workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  if (workers <= 1 || rows.size() < 2) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = solve(inst, p_grid[i], opts);
    return rows;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < rows.size(); i += workers) rows[i] = solve(inst, p_grid[i], opts);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

namespace {

void require_all_optimal(std::span<const SolveReport> table) {
  for (const SolveReport& r : table) {
    if (r.status != SolveStatus::Optimal) throw Error("nonuniform_status", "audit needs every row Optimal");
  }
}

std::vector<long long> grid_key(const Vec& p) {
  std::vector<long long> key(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) key[i] = std::llround(p(i) * 1e7);
  return key;
}

}  // namespace

ConvexityAuditReport convexity_audit(std::span<const SolveReport> table) {
  require_all_optimal(table);
  std::map<std::vector<long long>, double> lookup;
  for (const SolveReport& r : table) lookup.emplace(grid_key(r.p), r.value);

  ConvexityAuditReport rep;
  constexpr std::size_t kKeep = 5;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      const auto it = lookup.find(grid_key(0.5 * (table[i].p + table[j].p)));
      if (it == lookup.end()) continue;
      ++rep.triples;
      const double excess = it->second - 0.5 * (table[i].value + table[j].value);
      rep.max_midpoint_violation = std::max(rep.max_midpoint_violation, excess);
      if (excess > 0.0) {
        rep.worst.push_back({table[i].p, table[j].p, excess});
        std::sort(rep.worst.begin(), rep.worst.end(), [](auto& a, auto& b) { return a.excess > b.excess; });
        if (rep.worst.size() > kKeep) rep.worst.pop_back();
      }
    }
  }
  return rep;
}

LipschitzAuditReport lipschitz_audit(std::span<const SolveReport> table, int window) {
  if (table.size() < 3) throw Error("grid_too_small", "need at least 3 grid points");
  require_all_optimal(table);
  if (window < 1) window = 1;
  std::vector<std::pair<double, double>> pts;
  for (const SolveReport& r : table) {
    if (r.p.size() != 1) throw Error("dim_mismatch", "lipschitz audit needs a 1-D parameter grid");
    pts.emplace_back(r.p(0), r.value);
  }
  std::sort(pts.begin(), pts.end());
  // quotient[i] belongs to the gap between sorted rows i and i+1
  std::vector<double> quotient(pts.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h = pts[i + 1].first - pts[i].first;
    quotient[i] = h > 0.0 ? std::abs(pts[i + 1].second - pts[i].second) / h : 0.0;
  }
  LipschitzAuditReport rep;
  rep.window = window;
  const long last = static_cast<long>(quotient.size()) - 1;
  for (long i = 0; i < static_cast<long>(pts.size()); ++i) {
    double local = 0.0;
    for (long g = std::max(0L, i - window); g <= std::min(last, i + window - 1); ++g) local = std::max(local, quotient[g]);
    rep.local_constants.push_back(local);
    rep.max_constant = std::max(rep.max_constant, local);
  }
  return rep;
}

DichotomyReport dichotomy_audit(std::span<const SolveReport> table) {
  DichotomyReport rep;
  for (const SolveReport& r : table) {
    switch (r.status) {
      case SolveStatus::Optimal:
        ++rep.optimal;
        break;
      case SolveStatus::Unbounded:
        ++rep.unbounded;
        break;
      case SolveStatus::Infeasible:
        ++rep.infeasible;
        break;
    }
  }
  const int total = static_cast<int>(table.size());
  rep.holds = total > 0 && (rep.optimal == total || rep.unbounded == total);
  return rep;
}

}  // namespace svi
