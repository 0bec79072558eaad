#include <doctest.h>

#include "instances.hpp"
#include "svi/maps.hpp"
#include "svi/sampling.hpp"

using namespace svi;
using svi::test::m11;
using svi::test::v1;

TEST_CASE("fan evaluation on the worked example") {
  const ProblemInstance w = test::worked_example();
  const GeneratorSet at10 = eval_map(w.map, w.cone, v1(1), v1(0));
  REQUIRE_FALSE(at10.points.empty());
  for (const Vec& y : at10.points) CHECK(y(0) == doctest::Approx(-1.0));
  const GeneratorSet at01 = eval_map(w.map, w.cone, v1(0), v1(1));
  CHECK(at01.points.size() == 2);
  CHECK(at01.rays.empty());
  CHECK(w.map.homogeneous());
  CHECK(w.map.lipschitz_bound() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("affine-plus-cone evaluation carries the cone rays") {
  const ProblemInstance f = test::first_example();
  const GeneratorSet g = eval_map(f.map, f.cone, v1(2), v1(0.5));
  REQUIRE(g.points.size() == 1);
  CHECK(g.points[0](0) == doctest::Approx(1.5));
  CHECK(g.rays.size() == 1);
}

TEST_CASE("translation shifts every offset") {
  const ProblemInstance w = test::worked_example();
  const SetValuedMap t = w.map.translated(v1(3));
  CHECK_FALSE(t.homogeneous());
  CHECK(t.image(1, v1(1), v1(1))(0) == doctest::Approx(4.0));
}

TEST_CASE("empty fan is rejected") { CHECK_THROWS_WITH_AS(SetValuedMap::fan({}), doctest::Contains("empty_fan"), Error); }

TEST_CASE("C-concavity holds for the reference maps") {
  for (const ProblemInstance& inst : {test::worked_example(), test::first_example()}) {
    const ConcavityReport r = c_concavity_audit(inst.map, inst.cone, 300, 17);
    CHECK(r.samples == 300);
    CHECK(r.violations.empty());
  }
}

TEST_CASE("C-concavity audit flags a convex nonlinear generator") {
  const ProblemInstance w = test::worked_example();
  const SetValuedMap bent = w.map.with_hook([&](std::size_t i, const Vec& p, const Vec& x) {
    if (i == 0) return Vec(Vec::Constant(1, x(0) * x(0) - p(0)));
    return Vec(w.map.generators()[i].M * p + w.map.generators()[i].L * x);
  });
  CHECK_FALSE(bent.affine());
  const ConcavityReport r = c_concavity_audit(bent, w.cone, 300, 17);
  CHECK_FALSE(r.violations.empty());
  CHECK(r.max_gap > 1e-3);
}

TEST_CASE("boundedness of F minus C") {
  const ProblemInstance w = test::worked_example();
  const ProblemInstance f = test::first_example();
  CHECK(c_boundedness_check(w.map, w.cone, v1(0), v1(1)));
  CHECK(c_boundedness_check(f.map, f.cone, v1(0), v1(1)));
}

TEST_CASE("separable fan equals the Minkowski sum of scaled blocks") {
  // Blocks A_1 = conv{(1,0),(0,1)}, A_2 = conv{(1,1),(2,0),(0,0)} in R^2.
  const GeneratorSet a1(2, {(Vec(2) << 1, 0).finished(), (Vec(2) << 0, 1).finished()});
  const GeneratorSet a2(2, {(Vec(2) << 1, 1).finished(), (Vec(2) << 2, 0).finished(), (Vec(2) << 0, 0).finished()});
  const SetValuedMap h = separable_fan({a1, a2});
  CHECK(h.separable());
  CHECK(h.generators().size() == 6);
  const PolyhedralCone c = PolyhedralCone::nonnegative_orthant(2);
  Sampler rng(3);
  for (int k = 0; k < 40; ++k) {
    const Vec x = rng.box(2, 2.0);  // includes negative coordinates
    auto scaled = [&](const GeneratorSet& a, double t) {
      GeneratorSet s(2);
      for (const Vec& p : a.points) s.points.push_back(t * p);
      return s;
    };
    const GeneratorSet direct = minkowski_sum(scaled(a1, x(0)), scaled(a2, x(1)));
    const GeneratorSet fan = eval_map(h, c, Vec(0), x);
    for (const Vec& y : fan.points) CHECK(member(direct, y, 1e-9));
    for (const Vec& y : direct.points) CHECK(member(fan, y, 1e-9));
    const bool negative = (x.array() < 0.0).any();
    CHECK(eval_warnings(h, Vec(0), x).empty() == !negative);
  }
}

TEST_CASE("separable fan rejects unbounded blocks") {
  const GeneratorSet ray(1, {v1(0)}, {v1(1)});
  CHECK_THROWS_WITH_AS(separable_fan({ray}), doctest::Contains("noncompact_block"), Error);
}
