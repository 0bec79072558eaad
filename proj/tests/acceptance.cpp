// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "instances.hpp"
#include "oracles.hpp"
#include "svi/grid.hpp"
#include "svi/increase.hpp"
#include "svi/penalty.hpp"
#include "svi/sampling.hpp"
#include "svi/sensitivity.hpp"

using namespace svi;
using svi::test::v1;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  if (!v.pass) ++failures;
  std::printf("%s [%d] %s%s%s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.empty() ? "" : " :: ",
              v.detail.c_str());
  std::fflush(stdout);
}

Verdict value_function() {
  Verdict v;
  const ProblemInstance w = test::worked_example();
  const auto t0 = Clock::now();
  const auto table = value_grid(w, product_grid(-2.0, 2.0, 0.01));
  const double elapsed = seconds_since(t0);
  double val_err = 0.0, arg_err = 0.0;
  for (const SolveReport& r : table) {
    v.require(r.status == SolveStatus::Optimal && r.path == SolvePath::Lp, "non-optimal or non-LP row");
    if (r.status != SolveStatus::Optimal) continue;
    const double p = r.p(0);
    val_err = std::max(val_err, std::abs(r.value - oracle::worked_val(p)));
    arg_err = std::max(arg_err, std::abs(r.argmin(0) - oracle::worked_argmin(p)));
  }
  v.require(table.size() == 401, "grid size");
  v.require(val_err <= 1e-8, fmt("val error %.3g", val_err));
  v.require(arg_err <= 1e-8, fmt("argmin error %.3g", arg_err));
  v.require(elapsed <= 5.0, fmt("runtime %.2fs", elapsed));
  if (v.pass) v.detail = fmt("val err %.2g, argmin err %.2g, %.3fs", val_err, arg_err, elapsed);
  return v;
}

Verdict subdifferentials() {
  Verdict v;
  const ProblemInstance w = test::worked_example();
  const double cases[3][3] = {{1.0, 2.0, 2.0}, {0.0, -0.5, 2.0}, {-1.0, -0.5, -0.5}};
  for (const auto& c : cases) {
    const SubdiffReport r = value_subdiff(w, v1(c[0]));
    double lo = 1e300, hi = -1e300;
    for (const Vec& g : r.value_subdiff.points) {
      lo = std::min(lo, g(0));
      hi = std::max(hi, g(0));
    }
    v.require(r.value_subdiff.rays.empty(), fmt("unbounded subdifferential at %g", c[0]));
    v.require(std::abs(lo - c[1]) <= 1e-6 && std::abs(hi - c[2]) <= 1e-6,
              fmt("p=%g got [%.9g, %.9g]", c[0], lo, hi));
    const OracleInterval o = subdiff_oracle_1d(w, c[0]);
    v.require(std::abs(o.lower - c[1]) <= 1e-5 && std::abs(o.upper - c[2]) <= 1e-5,
              fmt("oracle at p=%g gives [%.9g, %.9g]", c[0], o.lower, o.upper));
    if (v.pass) v.detail += fmt("p=%g: [%.6g, %.6g] ", c[0], lo, hi);
  }
  return v;
}

Verdict first_example() {
  Verdict v;
  const ProblemInstance f = test::first_example();
  const auto t0 = Clock::now();
  int unbounded = 0, certified = 0;
  const auto table = value_grid(f, product_grid(-2.0, 2.0, 0.01));
  for (const SolveReport& r : table) {
    if (r.status != SolveStatus::Unbounded || !(r.value == -INFINITY) || !r.certificate) continue;
    ++unbounded;
    // A recession direction of S(p) = (-inf, p] along which phi = p + x decreases.
    const Vec& d = *r.certificate;
    const PolyhedronH region = feasible_region(f.map, f.cone, r.p).region;
    const Vec x0 = v1(r.p(0) - 1.0);
    if (region.contains(x0 + 1e3 * d) && d(0) < 0.0) ++certified;
  }
  v.require(unbounded == static_cast<int>(table.size()), fmt("%g of %g rows unbounded", unbounded, table.size()));
  v.require(certified == unbounded, "certificate check failed");
  const auto grid = joint_grid(product_grid(-2.0, 2.0, 1.0), product_grid(-3.0, 3.0, 1.0));
  const AlphaFReport a = alpha_f_estimate(f.map, f.cone, grid);
  v.require(a.status == "certified" && a.value >= 2.0 - 1e-3, fmt("alpha_F %.6g", a.value));
  const double elapsed = seconds_since(t0);
  v.require(elapsed <= 5.0, fmt("runtime %.2fs", elapsed));
  if (v.pass) v.detail = fmt("%g unbounded rows, alpha_F %.6g, %.3fs", unbounded, a.value, elapsed);
  return v;
}

Verdict error_bound() {
  Verdict v;
  const auto grid = joint_grid(product_grid(-2.0, 2.0, 0.1), product_grid(-3.0, 3.0, 0.1));
  int checked = 0;
  for (const ProblemInstance& inst : {test::worked_example(), test::first_example()}) {
    const ErrorBoundReport r = error_bound_audit(inst.map, inst.cone, 1.9, grid, 2.0, 1e-7);
    v.require(r.violations.empty(), fmt("%g violations", r.violations.size()));
    checked += r.checked;
  }
  if (v.pass) v.detail = fmt("%g infeasible points checked", checked);
  return v;
}

Verdict convexity() {
  Verdict v;
  const ProblemInstance w = test::worked_example();
  const ConvexityAuditReport c = convexity_audit(value_grid(w, product_grid(-2.0, 2.0, 0.01)));
  v.require(c.max_midpoint_violation <= 1e-7, fmt("val midpoint violation %.3g", c.max_midpoint_violation));

  Sampler rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec p1 = rng.box(1, 2.0), x1 = rng.box(1, 3.0), p2 = rng.box(1, 2.0), x2 = rng.box(1, 3.0);
    const double t = rng.uniform(0.0, 1.0);
    const double at = excess_at(w.map, w.cone, t * p1 + (1 - t) * p2, t * x1 + (1 - t) * x2).value;
    const double comb = t * excess_at(w.map, w.cone, p1, x1).value + (1 - t) * excess_at(w.map, w.cone, p2, x2).value;
    worst = std::max(worst, at - comb);
  }
  v.require(worst <= 1e-8, fmt("excess convexity violation %.3g", worst));

  const RegionConvexityReport r = convexity_of_region_audit(w.map, w.cone, 1000, 2024);
  v.require(r.samples == 1000 && r.violations.empty(), fmt("%g region violations", r.violations.size()));
  if (v.pass) v.detail = fmt("val %.2g, excess %.2g, region 0/1000", c.max_midpoint_violation, worst);
  return v;
}

Verdict penalty() {
  Verdict v;
  const ProblemInstance w = test::worked_example();
  const double points[2][2] = {{1.0, 1.0}, {-1.0, -0.5}};
  std::string summary;
  for (const auto& pt : points) {
    const double pb = pt[0], xb = pt[1];
    // Oracle first: dense scan of phi + lambda * exc in x.
    const double expected = oracle::penalty_threshold_by_scan(
        [&](double x) { return oracle::worked_phi(pb, x); }, [&](double x) { return oracle::worked_excess(pb, x); },
        xb);
    const PenaltyReport r = penalty_threshold(w, v1(pb), v1(xb), 100.0, 1e-3);
    v.require(r.lambda_ok - r.lambda_fail <= 1e-3, "bracket too wide");
    v.require(r.lambda_fail - 1e-3 <= expected && expected <= r.lambda_ok + 1e-3,
              fmt("oracle %.6g outside (%.6g, %.6g)", expected, r.lambda_fail, r.lambda_ok));
    const PenaltyCheck c = penalty_check(w, v1(pb), v1(xb), 2.0 * expected);
    v.require(c.gap <= 1e-5, fmt("minimiser gap %.3g at 2 lambda*", c.gap));
    summary += fmt("(%g: oracle %.4f, bracket %.4f..", pb, expected, r.lambda_fail) + fmt("%.4f) ", r.lambda_ok);
  }
  if (v.pass) v.detail = summary;
  return v;
}

Verdict calmness() {
  Verdict v;
  const ProblemInstance w = test::worked_example();
  const auto grid = product_grid(-2.0, 2.0, 0.01);
  const auto table = value_grid(w, grid);
  const LipschitzAuditReport lip = lipschitz_audit(table);
  std::string summary;
  for (double pb : {-1.0, 1.0}) {
    const std::size_t row = static_cast<std::size_t>(std::lround((pb + 2.0) / 0.01));
    const double local = lip.local_constants.at(row);
    const CalmnessEstimate c = calmness_estimate(w, v1(pb), v1(oracle::worked_argmin(pb)), 0.3, 500, 0, 7);
    v.require(c.lambda_bound <= local + 1e-4, fmt("p=%g bound %.6g > local %.6g", pb, c.lambda_bound, local));
    summary += fmt("p=%g: %.4f <= %.4f ", pb, c.lambda_bound, local);
  }
  if (v.pass) v.detail = summary;
  return v;
}

// lambda times a product of Givens rotations in random planes.
Mat rescaled_rotation(int n, double lambda, Sampler& rng) {
  Mat o = Mat::Identity(n, n);
  for (int k = 0; k < 3 * n; ++k) {
    const int i = static_cast<int>(rng.uniform(0, n)) % n;
    const int j = (i + 1 + static_cast<int>(rng.uniform(0, n - 1)) % (n - 1)) % n;
    const double th = rng.uniform(-M_PI, M_PI);
    Mat g = Mat::Identity(n, n);
    g(i, i) = g(j, j) = std::cos(th);
    g(i, j) = -std::sin(th);
    g(j, i) = std::sin(th);
    o = g * o;
  }
  return lambda * o;
}

Verdict increase() {
  Verdict v;
  Sampler rng(808);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 3;
    const double lambda = rng.uniform(0.5, 6.0);
    worst = std::max(worst, std::abs(open_covering_bound(rescaled_rotation(n, lambda, rng)) - lambda));
  }
  v.require(worst <= 1e-9, fmt("covering error %.3g", worst));
  const double rot = rotation_increase_bound(4, 5.0, 0.0);
  v.require(rot == 2.0, fmt("rotation bound %.17g", rot));
  const ProblemInstance w = test::worked_example();
  const IncreaseCertificate c = fan_increase_certificate(w.map, w.cone, FanVariable::StateOnly);
  v.require(c.alpha_lower && *c.alpha_lower >= 2.0, "state-only fan certificate below 2");
  if (v.pass) v.detail = fmt("covering err %.2g, rotation %g, fan alpha %.6g", worst, rot, *c.alpha_lower);
  return v;
}

Verdict kernel() {
  Verdict v;
  Sampler rng(99);
  int lp_bad = 0, lp_infeasible = 0;
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + k % 3;
    const int extra = static_cast<int>(rng.uniform(0, 8 - 2 * d + 1)) % (8 - 2 * d + 1);
    const int m = 2 * d + extra;
    Mat a(m, d);
    Vec b(m);
    for (int i = 0; i < d; ++i) {  // bounding box keeps the vertex oracle complete
      a.row(2 * i) = Vec::Unit(d, i).transpose();
      a.row(2 * i + 1) = -Vec::Unit(d, i).transpose();
      b(2 * i) = rng.uniform(1.0, 5.0);
      b(2 * i + 1) = rng.uniform(1.0, 5.0);
    }
    for (int i = 2 * d; i < m; ++i) {
      a.row(i) = rng.box(d, 1.0).transpose();
      b(i) = rng.uniform(-1.5, 2.0);
    }
    const Vec c = rng.box(d, 1.0);
    const LpResult lp = lp_solve(c, PolyhedronH(a, b));
    const auto ref = oracle::lp_by_vertices(c, a, b);
    if (!ref) {
      ++lp_infeasible;
      if (lp.status != LpStatus::Infeasible) ++lp_bad;
    } else if (lp.status != LpStatus::Optimal || std::abs(lp.value - *ref) > 1e-8) {
      ++lp_bad;
    }
  }
  v.require(lp_bad == 0, fmt("%g LP mismatches", lp_bad));

  int fm_bad = 0, probes = 0;
  for (int k = 0; k < 100; ++k) {
    const int m = 4 + k % 5;
    Mat a(m, 3);
    Vec b(m);
    for (int i = 0; i < m; ++i) {
      a.row(i) = rng.box(3, 1.0).transpose();
      b(i) = rng.uniform(0.2, 2.0);
    }
    const PolyhedronH sys(a, b);
    const std::vector<int> keep{0, 1};
    const PolyhedronH shadow = fm_project(sys, keep);
    for (int j = 0; j < 10; ++j) {
      const Vec y = rng.box(2, 3.0);
      PolyhedronH fibre(1);
      for (int i = 0; i < m; ++i) fibre.add_row(Vec::Constant(1, a(i, 2)), b(i) - a(i, 0) * y(0) - a(i, 1) * y(1));
      // Skip points within round-off of the shadow boundary.
      const double margin = shadow.rows() ? shadow.max_violation(y) : -1.0;
      if (std::abs(margin) < 1e-7) continue;
      ++probes;
      if (shadow.contains(y, 0.0) != is_feasible(fibre)) ++fm_bad;
    }
  }
  v.require(fm_bad == 0, fmt("%g FM mismatches", fm_bad));
  if (v.pass) v.detail = fmt("200 LPs (%g infeasible), %g FM probes over 100 systems", lp_infeasible, probes);
  return v;
}

}  // namespace

int main() {
  report(1, "worked-example value function and minimisers on [-2,2] step 0.01", value_function);
  report(2, "worked-example subdifferentials at -1, 0, 1 with difference-quotient oracle", subdifferentials);
  report(3, "first example unbounded on the grid with certificates; alpha_F >= 2 - 1e-3", first_example);
  report(4, "global error bound with alpha = 1.9 on both fixtures", error_bound);
  report(5, "convexity of val, of the excess and of the feasible region", convexity);
  report(6, "penalty thresholds against the dense-scan oracle", penalty);
  report(7, "calmness bound below the local Lipschitz constant of val", calmness);
  report(8, "covering bounds, rotation bound and fan certificate", increase);
  report(9, "LP vs vertex enumeration and Fourier-Motzkin vs LP feasibility", kernel);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
