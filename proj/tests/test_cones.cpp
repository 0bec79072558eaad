#include <doctest.h>

#include "svi/cones.hpp"

using namespace svi;

namespace {
Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
}  // namespace

TEST_CASE("orthant membership and distance") {
  const PolyhedralCone c = PolyhedralCone::nonnegative_orthant(2);
  CHECK(cone_contains(c, v2(0, 3)));
  CHECK_FALSE(cone_contains(c, v2(-1e-3, 3)));
  CHECK(dist_to_cone(c, v2(-3, -4)) == doctest::Approx(5.0));
  CHECK(dist_to_cone(c, v2(2, -1)) == doctest::Approx(1.0));
}

TEST_CASE("normal cone of the half-line") {
  const PolyhedralCone c = PolyhedralCone::nonnegative_orthant(1);
  const GeneratorSet at0 = normal_cone(c, v1(0.0));
  REQUIRE(at0.rays.size() == 1);
  CHECK(at0.rays[0](0) == doctest::Approx(-1.0));
  CHECK(normal_cone(c, v1(1.0)).rays.empty());
  CHECK_THROWS_WITH_AS(normal_cone(c, v1(-1.0)), doctest::Contains("point_not_in_cone"), Error);
}

TEST_CASE("excess over a cone") {
  const PolyhedralCone c = PolyhedralCone::nonnegative_orthant(1);
  const Excess e = excess_over_cone(GeneratorSet(1, {v1(-1.0), v1(2.0)}), c);
  CHECK_FALSE(e.unbounded);
  CHECK(e.value == doctest::Approx(1.0));
  CHECK(excess_over_cone(GeneratorSet(1, {v1(0.5)}, {v1(1.0)}), c).value == 0.0);
  CHECK(excess_over_cone(GeneratorSet(1, {v1(0.5)}, {v1(-1.0)}), c).unbounded);
}

TEST_CASE("cone generators") {
  // {y : y1 >= 0, y1 - y2 >= 0} has extreme rays (0,-1) and (1,1).
  const PolyhedralCone c(2, {v2(1, 0), v2(1, -1)});
  REQUIRE(c.has_rays());
  CHECK(c.rays().size() == 2);
  for (const Vec& r : c.rays()) CHECK(cone_contains(c, r));
  CHECK_FALSE(c.is_trivial());
  const PolyhedralCone zero(1, {v1(1.0), v1(-1.0)});
  CHECK(zero.is_trivial());
  const PolyhedralCone big = PolyhedralCone::nonnegative_orthant(5);
  CHECK_THROWS_WITH_AS(big.rays(), doctest::Contains("rays_unavailable"), Error);
}

TEST_CASE("cone construction rejects degenerate data") {
  CHECK_THROWS_AS(PolyhedralCone(2, {}), Error);
  CHECK_THROWS_AS(PolyhedralCone(2, {v2(0, 0)}), Error);
}
