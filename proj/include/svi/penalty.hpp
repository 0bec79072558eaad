#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svi/value_fn.hpp"

namespace svi {

/// phi(p, x) + lambda exc(F(p, x), C). Throws Error("penalty_undefined") when
/// the excess is infinite.
double penalized_value(const ProblemInstance& inst, const Vec& p, double lambda, const Vec& x);

struct PenaltyOptions {
  int perturbations = 8;
  double perturb_radius = 1.0;
  int iterations = 5000;
  double match_tol = 1e-5;
  std::uint64_t seed = 11;
};

/// Best iterate of normalised subgradient descent on phi_lambda(p, .) with
/// steps decaying geometrically from 1 to 1e-9.
Vec minimize_penalized(const ProblemInstance& inst, const Vec& p, double lambda, const Vec& start, int iterations);

struct PenaltyCheck {
  double lambda = 0.0;
  Vec minimizer;  // the start whose run ended farthest from x_bar
  double gap = 0.0;
};

struct PenaltyReport {
  Vec p_bar, x_bar;
  double lambda_star_estimate = 0.0;  // bracket midpoint
  double lambda_fail = 0.0;
  double lambda_ok = 0.0;
  std::vector<PenaltyCheck> verified_lambdas;
  std::vector<std::string> flags;
  std::string note;
};

/// Runs the minimiser-matching predicate at lambda: every run (from x_bar and
/// seeded perturbations) ends within match_tol of x_bar.
PenaltyCheck penalty_check(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double lambda,
                           const PenaltyOptions& opts = {});

/// Bisection on [0, lambda_max] until the bracket (lambda_fail, lambda_ok) is
/// narrower than bisect_tol. If lambda_max fails the report carries the flag
/// "threshold_above_lambda_max" and lambda_ok = +inf.
PenaltyReport penalty_threshold(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double lambda_max,
                                double bisect_tol, const PenaltyOptions& opts = {});

struct CalmnessEstimate {
  Vec p_bar, x_bar;
  double r = 0.0;
  int samples = 0;  // probes with a feasible point near x_bar
  int empty_probes = 0;
  double inf_quotient = 0.0;
  double lambda_bound = 0.0;  // max(0, -inf_quotient)
  std::uint64_t seed = 0;
};

/// Samples p in the punctured ball B(p_bar, r) and lower-estimates
///   inf (phi(p, x) - phi(p_bar, x_bar)) / |p - p_bar|
/// over x in S(p) near x_bar. Max-affine objectives minimise exactly by LP over
/// S(p) and the box |x - x_bar|_inf <= r; otherwise x_samples points of the
/// box are tried. Throws Error("no_feasible_probes").
CalmnessEstimate calmness_estimate(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double r,
                                   int p_samples, int x_samples, std::uint64_t seed);

struct SubregReport {
  double beta_estimate = 0.0;
  bool holds_at_sampling = false;
  int samples = 0;
  int feasible_skipped = 0;
  int infeasible_in_p = 0;
  std::vector<std::string> flags;
};

/// For x in B(x_bar, r_beta): beta >= dist(p_bar, {p : F(p, x) in C}) / exc(F(p_bar, x), C).
SubregReport uniform_subreg_check(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double r_beta,
                                  int samples, std::uint64_t seed);

}  // namespace svi
