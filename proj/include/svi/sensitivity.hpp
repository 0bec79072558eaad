#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svi/value_fn.hpp"

namespace svi {

enum class Qualification { PolyhedralCertified, Unverified };

const char* to_string(Qualification q);

/// conv of the active piece gradients (g_p, g_x) + Q (p, x), over R^{s+n}.
/// A piece is active when within tol (relative) of the max.
GeneratorSet objective_subdiff(const ConvexObjective& phi, const Vec& p, const Vec& x, double tol = tol::kActive);

/// Generators whose image is farthest from C (all of them at feasible
/// points). Throws Error("empty_fan").
std::vector<std::size_t> active_generators(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x,
                                           double tol = tol::kActive);

/// The cone sum_i (M_i, L_i)^T N_C(image_i) over active generators, as the
/// point 0 plus rays in R^{s+n}. Throws Error("not_a_solution_point") when x
/// is infeasible for p.
GeneratorSet coderivative_cone(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x);

/// Polyhedral objective and affine map (so graph S is polyhedral) gives
/// PolyhedralCertified; anything else is Unverified.
Qualification qualification_check(const ProblemInstance& inst);

struct SubdiffOptions {
  /// Proceed even when the qualification is Unverified.
  bool allow_unverified = false;
  int support_directions = 16;  // outer mode only
  std::uint64_t seed = 7;
};

struct SubdiffReport {
  Vec p_bar;
  Vec x_bar;
  GeneratorSet objective_subdiff;
  GeneratorSet coderivative_cone;
  /// The subdifferential in parameter space. In "outer" mode this is the
  /// vertex set of the sampled outer polytope (when s <= 4).
  GeneratorSet value_subdiff;
  std::optional<PolyhedronH> value_subdiff_halfspaces;
  Qualification qualification = Qualification::Unverified;
  std::string mode;  // "exact" or "outer"
  std::optional<bool> argmin_unique;
  std::vector<std::string> notes;
};

/// w = p* + q* with (p*, x*) in the objective subdifferential and (q*, -x*) in
/// the coderivative cone, at the solver's minimiser. Exact by LP for s = 1 and
/// by Fourier-Motzkin when the joint system fits; outer approximation by
/// support sampling otherwise.
/// Errors: "not_optimal", "qualification_unverified".
SubdiffReport value_subdiff(const ProblemInstance& inst, const Vec& p_bar, const SubdiffOptions& opts = {});

struct OracleInterval {
  double lower = 0.0;  // left derivative
  double upper = 0.0;  // right derivative
  bool monotone = true;  // difference quotients behaved as for a convex function
  int probes = 0;
};

/// One-sided difference quotients of val at p_bar (s = 1) over
/// h = h0 * shrink^k, k < steps. Throws Error("oracle_probe_failed").
OracleInterval subdiff_oracle_1d(const ProblemInstance& inst, double p_bar, double h0 = 0.1, double shrink = 0.5,
                                 int steps = 8);

}  // namespace svi
