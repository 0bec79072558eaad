#include "svi/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svi/sampling.hpp"
#include "svi/sensitivity.hpp"

namespace svi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec objective_x_subgradient(const ConvexObjective& phi, const Vec& p, const Vec& x) {
  std::size_t best = 0;
  double top = -kInf;
  for (std::size_t k = 0; k < phi.pieces().size(); ++k) {
    const double v = phi.piece_value(k, p, x);
    if (v > top) {
      top = v;
      best = k;
    }
  }
  Vec g = phi.pieces()[best].g_x;
  if (phi.quadratic()) g += phi.quadratic_gradient(p, x).tail(x.size());
  return g;
}

// Gradient in x of dist(image_i, C) for the farthest generator i (zero inside C).
Vec excess_x_subgradient(const ProblemInstance& inst, const Vec& p, const Vec& x) {
  const SetValuedMap& f = inst.map;
  double top = 0.0;
  Vec g = Vec::Zero(x.size());
  for (std::size_t i = 0; i < f.generators().size(); ++i) {
    const Vec y = f.image(i, p, x);
    if (cone_contains(inst.cone, y, 0.0)) continue;
    const Projection pr = project_polyhedron(inst.cone.halfspaces(), y);
    if (pr.distance > top) {
      top = pr.distance;
      g = f.generators()[i].L.transpose() * ((y - pr.point) / pr.distance);
    }
  }
  return g;
}

}  // namespace

double penalized_value(const ProblemInstance& inst, const Vec& p, double lambda, const Vec& x) {
  if (lambda < 0.0) throw Error("invalid_argument", "lambda must be nonnegative");
  const Excess e = excess_at(inst.map, inst.cone, p, x);
  if (e.unbounded) throw Error("penalty_undefined", "excess is infinite");
  return inst.objective(p, x) + lambda * e.value;
}

Vec minimize_penalized(const ProblemInstance& inst, const Vec& p, double lambda, const Vec& start, int iterations) {
  Vec x = start;
  Vec best = x;
  double best_val = penalized_value(inst, p, lambda, x);
  const double decay = std::pow(1e-9, 1.0 / std::max(iterations, 1));
  double step = 1.0;
  for (int k = 0; k < iterations; ++k, step *= decay) {
    Vec g = objective_x_subgradient(inst.objective, p, x);
    if (lambda > 0.0) g += lambda * excess_x_subgradient(inst, p, x);
    const double gn = g.norm();
    if (gn < 1e-14) break;
    x -= (step / gn) * g;
    const double v = penalized_value(inst, p, lambda, x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  return best;
}

PenaltyCheck penalty_check(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double lambda,
                           const PenaltyOptions& opts) {
  Sampler rng(opts.seed);
  PenaltyCheck out;
  out.lambda = lambda;
  out.gap = -1.0;
  for (int k = 0; k <= opts.perturbations; ++k) {
    const Vec start = k == 0 ? x_bar : Vec(x_bar + rng.ball(inst.n(), opts.perturb_radius));
    const Vec xm = minimize_penalized(inst, p_bar, lambda, start, opts.iterations);
    const double gap = (xm - x_bar).norm();
    if (gap > out.gap) {
      out.gap = gap;
      out.minimizer = xm;
    }
  }
  return out;
}

PenaltyReport penalty_threshold(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double lambda_max,
                                double bisect_tol, const PenaltyOptions& opts) {
  if (!(lambda_max > 0.0) || !(bisect_tol > 0.0)) {
    throw Error("invalid_argument", "need lambda_max > 0 and bisect_tol > 0");
  }
  PenaltyReport rep;
  rep.p_bar = p_bar;
  rep.x_bar = x_bar;
  rep.note = "predicate tests global minimisation of the penalised objective";
  if (qualification_check(inst) == Qualification::Unverified) {
    rep.note += "; qualification unverified, local and global minimisers may differ";
  }

  auto passes = [&](double lambda) {
    PenaltyCheck c = penalty_check(inst, p_bar, x_bar, lambda, opts);
    const bool ok = c.gap <= opts.match_tol;
    rep.verified_lambdas.push_back(std::move(c));
    return ok;
  };

  if (!passes(lambda_max)) {
    rep.flags.push_back("threshold_above_lambda_max");
    rep.lambda_fail = lambda_max;
    rep.lambda_ok = kInf;
    rep.lambda_star_estimate = kInf;
    return rep;
  }
  if (passes(0.0)) {
    rep.lambda_fail = rep.lambda_ok = rep.lambda_star_estimate = 0.0;
    return rep;
  }
  double lo = 0.0, hi = lambda_max;
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  rep.lambda_fail = lo;
  rep.lambda_ok = hi;
  rep.lambda_star_estimate = 0.5 * (lo + hi);
  return rep;
}

CalmnessEstimate calmness_estimate(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double r,
                                   int p_samples, int x_samples, std::uint64_t seed) {
  if (!(r > 0.0)) throw Error("invalid_argument", "radius must be positive");
  Sampler rng(seed);
  const int n = inst.n();
  const double base = inst.objective(p_bar, x_bar);
  const bool lp_path = inst.objective.polyhedral();

  CalmnessEstimate est;
  est.p_bar = p_bar;
  est.x_bar = x_bar;
  est.r = r;
  est.seed = seed;
  est.inf_quotient = kInf;
  for (int k = 0; k < p_samples; ++k) {
    Vec dp;
    do {
      dp = rng.ball(inst.s(), r);
    } while (dp.norm() < 1e-12);
    const Vec p = p_bar + dp;
    PolyhedronH region = feasible_region(inst.map, inst.cone, p).region;
    for (int j = 0; j < n; ++j) {
      region.add_row(Vec::Unit(n, j), x_bar(j) + r);
      region.add_row(-Vec::Unit(n, j), r - x_bar(j));
    }
    double best = kInf;
    if (lp_path) {
      PolyhedronH epi(n + 1);
      for (const AffinePiece& pc : inst.objective.pieces()) {
        Vec row(n + 1);
        row << pc.g_x, -1.0;
        epi.add_row(row, -(pc.g_p.dot(p) + pc.c));
      }
      for (int j = 0; j < region.rows(); ++j) {
        Vec row(n + 1);
        row << region.normals.row(j).transpose(), 0.0;
        epi.add_row(row, region.offsets(j));
      }
      const LpResult lp = lp_solve(Vec::Unit(n + 1, n), epi);
      if (lp.status == LpStatus::Optimal) best = inst.objective(p, lp.point.head(n));
    } else {
      for (int j = 0; j < x_samples; ++j) {
        const Vec x = x_bar + rng.box(n, r);
        if (region.contains(x)) best = std::min(best, inst.objective(p, x));
      }
    }
    if (!std::isfinite(best)) {
      ++est.empty_probes;
      continue;
    }
    ++est.samples;
    est.inf_quotient = std::min(est.inf_quotient, (best - base) / dp.norm());
  }
  if (est.samples == 0) throw Error("no_feasible_probes", "no sampled parameter had a feasible point near x_bar");
  est.lambda_bound = std::max(0.0, -est.inf_quotient);
  return est;
}

SubregReport uniform_subreg_check(const ProblemInstance& inst, const Vec& p_bar, const Vec& x_bar, double r_beta,
                                  int samples, std::uint64_t seed) {
  if (!(r_beta > 0.0)) throw Error("invalid_argument", "radius must be positive");
  Sampler rng(seed);
  SubregReport rep;
  rep.holds_at_sampling = true;
  for (int k = 0; k < samples; ++k) {
    const Vec x = x_bar + rng.ball(inst.n(), r_beta);
    ++rep.samples;
    const Excess e = excess_at(inst.map, inst.cone, p_bar, x);
    if (e.unbounded) {
      rep.holds_at_sampling = false;
      continue;
    }
    if (e.value <= tol::kFeas) {
      ++rep.feasible_skipped;
      continue;
    }
    const PolyhedronH region = parametric_feasible_in_p(inst.map, inst.cone, x);
    if (!is_feasible(region)) {
      ++rep.infeasible_in_p;
      continue;
    }
    const double d = project_polyhedron(region, p_bar).distance;
    const double ratio = d / e.value;
    if (!std::isfinite(ratio)) rep.holds_at_sampling = false;
    rep.beta_estimate = std::max(rep.beta_estimate, ratio);
  }
  if (rep.infeasible_in_p > 0) rep.flags.push_back("infeasible_in_p");
  return rep;
}

}  // namespace svi
