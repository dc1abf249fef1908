#include <liftreach/basis.hpp>
#include <liftreach/target.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace liftreach;

TEST_CASE("trigger margin at a known collision-course state") {
  TriggerSpec spec;  // t_adv = 1, a_adv = 0.5
  CHECK(spec.offset() == 0.5);
  StateVec x(4.0, 2.0, 2.2);
  CHECK(g0_value(x, spec) == Catch::Approx(-0.3));
  CHECK(in_trigger_set(x, spec));
  CHECK_FALSE(in_trigger_set(StateVec(4.0, 4.0, 2.2), spec));
}

TEST_CASE("trigger margin scales with the window parameters") {
  TriggerSpec spec{2.0, 0.25};
  CHECK(spec.offset() == 1.0);
  // g0 = 2 (x2 - x1) + x3 - 1
  CHECK(g0_value(StateVec(3.0, 1.0, 4.0), spec) == Catch::Approx(-1.0));
  CHECK(g0_value(StateVec(0.0, 0.0, 1.0), spec) == Catch::Approx(0.0));
}

TEST_CASE("trigger parameter validation") {
  CHECK_THROWS_AS((TriggerSpec{0.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TriggerSpec{1.0, -0.1}.validate()), std::invalid_argument);
  REQUIRE_NOTHROW((TriggerSpec{1.0, 0.0}.validate()));
}

TEST_CASE("half-space margin and membership") {
  HalfspaceTarget t;
  t.w = Eigen::Vector3d(1.0, -1.0, 0.0);
  t.c = 2.0;
  CHECK(t.margin(Eigen::Vector3d(3.0, 2.0, 7.0)) == Catch::Approx(-1.0));
  CHECK(t.contains(Eigen::Vector3d(3.0, 1.0, 0.0)));
  CHECK_FALSE(t.contains(Eigen::Vector3d(5.0, 1.0, 0.0)));
  Eigen::VectorXd wrong(4);
  CHECK_THROWS_AS(t.margin(wrong), std::invalid_argument);
}

TEST_CASE("lifted target weights are the cubic expansion of the margin") {
  TriggerSpec spec;
  MonomialBasis b(3);
  HalfspaceTarget t = lifted_target(spec, b);
  REQUIRE(t.w.size() == 10);
  // (x2 - x1 + x3)^3 expanded over the canonical order
  Eigen::VectorXd want(10);
  want << -1, 3, 3, -3, -6, -3, 1, 3, 3, 1;
  CHECK((t.w - want).norm() == 0.0);
  CHECK(t.c == Catch::Approx(0.125));
}

TEST_CASE("degree 1 lifted target is the margin itself") {
  TriggerSpec spec;
  MonomialBasis b(1);
  HalfspaceTarget t = lifted_target(spec, b);
  Eigen::VectorXd want(3);
  want << -1, 1, 1;
  CHECK((t.w - want).norm() == 0.0);
  CHECK(t.c == 0.5);
  StateVec x(4.0, 2.0, 2.2);
  CHECK(t.margin(b.lift(x)) == Catch::Approx(g0_value(x, spec)));
}

TEST_CASE("lifted membership agrees with the scalar trigger test") {
  TriggerSpec spec;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> sv(0.0, 10.0);
  std::uniform_real_distribution<double> sg(0.0, 20.0);
  for (int d : {1, 3, 5}) {
    MonomialBasis b(d);
    HalfspaceTarget t = lifted_target(spec, b);
    for (int i = 0; i < 10000; ++i) {
      StateVec x(sv(rng), sv(rng), sg(rng));
      bool scalar = in_trigger_set(x, spec);
      bool lifted = t.contains(b.lift(x));
      if (scalar != lifted) {
        // disagreement is only tolerated within rounding distance of the boundary
        REQUIRE(std::abs(g0_value(x, spec)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("lifted membership on exact boundary states") {
  TriggerSpec spec;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> sv(0.0, 10.0);
  for (int d : {1, 3, 5}) {
    MonomialBasis b(d);
    HalfspaceTarget t = lifted_target(spec, b);
    for (int i = 0; i < 200; ++i) {
      double x1 = sv(rng), x2 = sv(rng);
      StateVec x(x1, x2, spec.offset() - spec.t_adv * (x2 - x1));  // g0 == 0 up to rounding
      if (x(2) < 0.0) continue;
      CHECK(std::abs(t.margin(b.lift(x))) <= 1e-9);
    }
  }
}
