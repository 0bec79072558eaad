#include <doctest.h>

#include <cmath>
#include <numbers>

#include "instances.hpp"
#include "svi/grid.hpp"
#include "svi/increase.hpp"
#include "svi/sampling.hpp"

using namespace svi;
using svi::test::m11;
using svi::test::v1;

namespace {

// min over unit y in R^2 of |lam^T y| by an angular scan.
double covering_by_scan(const Mat& lam) {
  double best = 1e300;
  for (int k = 0; k < 200000; ++k) {
    const double th = std::numbers::pi * k / 200000.0;
    Vec y(2);
    y << std::cos(th), std::sin(th);
    best = std::min(best, (lam.transpose() * y).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("open covering bound") {
  Mat a(2, 3);
  a << 1, 2, 0, -1, 0.5, 3;
  CHECK(open_covering_bound(a) == doctest::Approx(covering_by_scan(a)).epsilon(1e-6));
  Sampler rng(5);
  for (int k = 0; k < 10; ++k) {
    Mat r(2, 2);
    r << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2);
    CHECK(open_covering_bound(r) == doctest::Approx(covering_by_scan(r)).epsilon(1e-6));
  }
  for (double th : {0.1, 1.0, 2.5}) {
    Mat g(2, 2);
    g << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK(open_covering_bound(g) == doctest::Approx(1.0));
  }
  CHECK(open_covering_bound(Mat::Ones(3, 2)) == 0.0);
  CHECK(open_covering_bound(Mat(0, 0)) == 0.0);
  CHECK(open_covering_bound(Mat::Ones(2, 2)) == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("fan certificates of the worked example") {
  const ProblemInstance w = test::worked_example();
  const IncreaseCertificate joint = fan_increase_certificate(w.map, w.cone, FanVariable::Joint);
  CHECK(joint.method == IncreaseMethod::FanAnalytic);
  CHECK(joint.eta == doctest::Approx(std::sqrt(2.0)));
  REQUIRE(joint.alpha_lower);
  CHECK(*joint.alpha_lower == doctest::Approx(1.0 + std::sqrt(2.0)));
  REQUIRE(joint.interior_witness);
  CHECK((*joint.interior_witness)(0) == doctest::Approx(-1.0));
  CHECK((*joint.interior_witness)(1) == doctest::Approx(1.0));

  const IncreaseCertificate state = fan_increase_certificate(w.map, w.cone, FanVariable::StateOnly);
  CHECK(state.eta == doctest::Approx(1.0));
  REQUIRE(state.alpha_lower);
  CHECK(*state.alpha_lower == doctest::Approx(2.0));
  CHECK(std::string(to_string(state.method)) == "fan_analytic");
}

TEST_CASE("degenerate fan has no certificate") {
  const SetValuedMap zero = SetValuedMap::fan({{m11(0), m11(0), v1(0)}});
  const IncreaseCertificate c = fan_increase_certificate(zero, PolyhedralCone::nonnegative_orthant(1));
  CHECK(c.method == IncreaseMethod::None);
  CHECK_FALSE(c.alpha_lower);
}

TEST_CASE("fan certificate preconditions") {
  const ProblemInstance f = test::first_example();
  CHECK_THROWS_WITH_AS(fan_increase_certificate(f.map, f.cone), doctest::Contains("not_a_fan"), Error);
  const ProblemInstance w = test::worked_example();
  CHECK_THROWS_WITH_AS(fan_increase_certificate(w.map.translated(v1(1)), w.cone, FanVariable::Joint),
                       doctest::Contains("not_homogeneous"), Error);
  // Different M_i: state-only certificate is unavailable.
  const SetValuedMap mixed = SetValuedMap::fan({{m11(1), m11(1), v1(0)}, {m11(-1), m11(2), v1(0)}});
  CHECK_THROWS_WITH_AS(fan_increase_certificate(mixed, w.cone, FanVariable::StateOnly),
                       doctest::Contains("not_homogeneous"), Error);
}

TEST_CASE("rotation bound") {
  CHECK(rotation_increase_bound(4, 5.0, 0.1) == doctest::Approx(1.8));
  CHECK(rotation_increase_bound(9, 10.0, 0.0) == doctest::Approx(3.0));
  CHECK_THROWS_WITH_AS(rotation_increase_bound(1, 5.0, 0.0), doctest::Contains("invalid_argument"), Error);
  CHECK_THROWS_WITH_AS(rotation_increase_bound(4, 5.0, -0.1), doctest::Contains("invalid_argument"), Error);
  CHECK_THROWS_WITH_AS(rotation_increase_bound(4, 4.0, 0.1), doctest::Contains("rescale_too_small"), Error);
  CHECK_THROWS_WITH_AS(rotation_increase_bound(4, 5.0, 0.5), doctest::Contains("perturbation_too_large"), Error);
}

TEST_CASE("numeric increase check on the worked example") {
  const ProblemInstance w = test::worked_example();
  CHECK(verify_increase_numeric(w.map, w.cone, v1(0), v1(-1), 1.9).holds_at_sampling);
  const IncreaseCheckReport bad = verify_increase_numeric(w.map, w.cone, v1(0), v1(-1), 10.0);
  CHECK_FALSE(bad.holds_at_sampling);
  CHECK(bad.worst_margin < 0.0);
  CHECK_THROWS_WITH_AS(verify_increase_numeric(w.map, w.cone, v1(0), v1(1), 1.5),
                       doctest::Contains("precondition_violated"), Error);
}

TEST_CASE("numeric check agrees with the analytic state bound") {
  const ProblemInstance w = test::worked_example();
  for (double p : {-1.0, 0.0, 1.5}) {
    for (double x : {-2.0, -0.5}) {
      if (excess_at(w.map, w.cone, v1(p), v1(x)).value <= tol::kFeas) continue;
      CHECK(verify_increase_numeric(w.map, w.cone, v1(p), v1(x), 1.95).holds_at_sampling);
    }
  }
}

TEST_CASE("numeric check needs an H-form of the target") {
  std::vector<AffineGenerator> gens{{Mat::Zero(5, 0), Mat::Ones(5, 1), -Vec::Ones(5)}};
  const SetValuedMap f = SetValuedMap::fan(gens);
  CHECK_THROWS_WITH_AS(
      verify_increase_numeric(f, PolyhedralCone::nonnegative_orthant(5), Vec(0), v1(0), 1.5),
      doctest::Contains("verification_unavailable"), Error);
}

TEST_CASE("alpha_F estimates") {
  const auto pg = product_grid(-2.0, 2.0, 1.0), xg = product_grid(-3.0, 3.0, 1.0);
  const auto grid = joint_grid(pg, xg);

  const ProblemInstance f = test::first_example();
  const AlphaFReport numeric = alpha_f_estimate(f.map, f.cone, grid);
  CHECK(numeric.status == "certified");
  CHECK(numeric.method == "numeric_sampled");
  CHECK(numeric.label == "grid_restricted");
  CHECK(numeric.value > 1.9);
  CHECK(numeric.value <= 2.0 + 1e-3);
  CHECK(numeric.points_with_excess > 0);

  const ProblemInstance w = test::worked_example();
  const AlphaFReport fan = alpha_f_estimate(w.map, w.cone, grid);
  CHECK(fan.status == "certified");
  CHECK(fan.method == "fan_analytic");
  CHECK(fan.value == doctest::Approx(2.0));

  const std::vector<PointPX> feasible{{v1(0), v1(1)}, {v1(1), v1(2)}};
  const AlphaFReport vac = alpha_f_estimate(w.map, w.cone, feasible);
  CHECK(vac.status == "vacuous");
  CHECK(std::isinf(vac.value));
}
