#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svi/feasibility.hpp"
#include "svi/instance.hpp"

namespace svi {

enum class SolveStatus { Optimal, Unbounded, Infeasible };

const char* to_string(SolveStatus s);

enum class SolvePath { Lp, Subgradient };

struct SolveOptions {
  /// Use the projected subgradient method even for max-affine objectives.
  bool force_subgradient = false;
  int max_iterations = 200000;
  double tolerance = 1e-6;
  /// Starting point of the subgradient path (default: projection of 0).
  std::optional<Vec> start;
};

/// One solve of min_x phi(p, x) over S(p).
struct SolveReport {
  Vec p;
  SolveStatus status = SolveStatus::Infeasible;
  double value = 0.0;  // +inf when Infeasible, -inf when Unbounded
  Vec argmin;          // set when Optimal
  int iterations = 0;
  std::optional<Vec> certificate;  // unit recession direction (LP path, Unbounded)
  SolvePath path = SolvePath::Lp;
  std::string note;  // "suspected", "iteration_cap", ...
};

/// Max-affine objectives are solved exactly as the epigraph LP
///   min t  s.t.  <g_x^k, x> - t <= -(<g_p^k, p> + c^k),  x in S(p).
/// A quadratic term switches to projected subgradient descent.
SolveReport solve(const ProblemInstance& inst, const Vec& p, const SolveOptions& opts = {});

/// One row per grid point in grid order. `parallel` spreads rows over threads.
std::vector<SolveReport> value_grid(const ProblemInstance& inst, std::span<const Vec> p_grid,
                                    const SolveOptions& opts = {}, bool parallel = false);

struct MidpointViolation {
  Vec p1, p2;
  double excess = 0.0;  // val(mid) - (val(p1) + val(p2)) / 2
};

struct ConvexityAuditReport {
  double max_midpoint_violation = 0.0;  // clamped below at 0
  long triples = 0;
  std::vector<MidpointViolation> worst;  // the few largest positive excesses
};

/// Checks val((p1+p2)/2) <= (val(p1)+val(p2))/2 for every pair of rows whose
/// midpoint is itself a row. Throws Error("nonuniform_status") unless every
/// row is Optimal.
ConvexityAuditReport convexity_audit(std::span<const SolveReport> table);

struct LipschitzAuditReport {
  std::vector<double> local_constants;  // per row: max adjacent quotient within the window
  double max_constant = 0.0;
  int window = 0;
};

/// 1-D grids only. Throws Error("grid_too_small") below 3 rows and
/// Error("nonuniform_status") unless every row is Optimal.
LipschitzAuditReport lipschitz_audit(std::span<const SolveReport> table, int window = 5);

struct DichotomyReport {
  int optimal = 0;
  int unbounded = 0;
  int infeasible = 0;
  bool holds = false;  // all Optimal or all Unbounded
};

DichotomyReport dichotomy_audit(std::span<const SolveReport> table);

}  // namespace svi
