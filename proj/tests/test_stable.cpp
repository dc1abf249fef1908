#include <liftreach/stable.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace liftreach;

TEST_CASE("scaled identity projects to the eigenvalue clamp") {
  Eigen::MatrixXd A = 1.5 * Eigen::MatrixXd::Identity(3, 3);
  StabilizeResult r = project_stable(A, 0.99);
  CHECK_FALSE(r.already_stable);
  CHECK(r.rho <= 0.99 + 1e-6);
  // nearest radius-0.99 matrix is 0.99 I at Frobenius distance 0.51 sqrt(3)
  CHECK(r.distance == Catch::Approx(0.8833459118601274).margin(1e-6));
  CHECK((r.A - 0.99 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("already stable matrices pass through untouched") {
  SECTION("contractive dense matrix") {
    Eigen::MatrixXd A(3, 3);
    A << 0.2, 0.1, 0.0,
         0.0, 0.3, 0.1,
         0.1, 0.0, 0.25;
    StabilizeResult r = project_stable(A, 0.95);
    CHECK(r.already_stable);
    CHECK(r.A == A);
    CHECK(r.distance == 0.0);
  }
  SECTION("large norm but small radius") {
    // triangular with a huge off-diagonal entry: the gate is the radius,
    // not the norm
    Eigen::MatrixXd A(2, 2);
    A << 0.9, 50.0,
         0.0, 0.9;
    StabilizeResult r = project_stable(A, 0.95);
    CHECK(r.already_stable);
    CHECK(r.A == A);
  }
  SECTION("projection is idempotent") {
    Eigen::MatrixXd A = 1.5 * Eigen::MatrixXd::Identity(3, 3);
    StabilizeResult once = project_stable(A, 0.99);
    StabilizeResult twice = project_stable(once.A, 0.99);
    CHECK(twice.already_stable);
    CHECK(twice.A == once.A);
  }
}

TEST_CASE("projection beats uniform scaling on random matrices") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dn(0.0, 0.5);
    Eigen::MatrixXd A(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) A(i, j) = dn(rng);
    double rho_in = spectral_radius(A);
    if (rho_in <= 0.95) continue;
    StabilizeResult r = project_stable(A, 0.95);
    CHECK(r.rho <= 0.95 + 1e-6);
    CHECK(r.A.allFinite());
    double fallback_dist = (A - A * (0.95 / rho_in)).norm();
    CHECK(r.distance <= fallback_dist + 1e-9);
  }
}

TEST_CASE("slightly unstable perturbation stays close") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dn(0.0, 0.01);
  Eigen::MatrixXd A = 0.995 * Eigen::MatrixXd::Identity(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) += dn(rng);
  REQUIRE(spectral_radius(A) > 0.99);
  StabilizeResult r = project_stable(A, 0.99);
  CHECK(r.rho <= 0.99 + 1e-6);
  // the move needed is on the order of the radius excess, far below the
  // uniform-scaling distance
  double fallback_dist = (A - A * (0.99 / spectral_radius(A))).norm();
  CHECK(r.distance < fallback_dist);
  CHECK(r.distance < 0.02);
}

TEST_CASE("projection input validation") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(project_stable(A, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(project_stable(A, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(project_stable(A, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(project_stable(Eigen::MatrixXd::Ones(2, 3), 0.95), std::invalid_argument);
  CHECK_NOTHROW(project_stable(A, 1.0));
}

TEST_CASE("model stabilization retags and preserves the rest") {
  LiftedModel m;
  m.d = 1;
  m.N = 3;
  m.dt = 0.1;
  m.gamma = 1.0;
  m.tag = StabilityTag::kRawLS;
  m.A = 1.2 * Eigen::MatrixXd::Identity(3, 3);
  m.B = Eigen::VectorXd::Constant(3, 0.5);

  LiftedModel s = stabilize_model(m, 0.99);
  CHECK(s.tag == StabilityTag::kGammaStable);
  CHECK(s.gamma == 0.99);
  CHECK(spectral_radius(s.A) <= 0.99 + 1e-6);
  CHECK(s.B == m.B);
  CHECK(s.d == m.d);
  CHECK(s.N == m.N);
  CHECK(s.dt == m.dt);
  CHECK_NOTHROW(s.validate());
}
