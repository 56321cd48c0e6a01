#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "evodyn/games.hpp"
#include "evodyn/simplex.hpp"

using namespace evodyn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_simplex_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = -std::log(u(rng));
  return x / x.sum();
}

}  // namespace

TEST_CASE("simplex state validation") {
  CHECK_NOTHROW(SimplexState(Eigen::Vector3d(0.5, 0.25, 0.25)));
  CHECK_NOTHROW(SimplexState(Eigen::Vector3d(1.0, 0.0, 0.0)));  // boundary is valid
  CHECK_THROWS_AS(SimplexState(Eigen::Vector3d(0.5, 0.5, 0.5)), ValidationError);
  CHECK_THROWS_AS(SimplexState(Eigen::Vector3d(-0.1, 0.6, 0.5)), ValidationError);
  CHECK_THROWS_AS(SimplexState(Eigen::VectorXd::Constant(1, 1.0)), ValidationError);
  CHECK_THROWS_AS(SimplexState(Eigen::Vector2d(0.5, std::nan(""))), ValidationError);

  // the documented sum tolerance
  VectorXd near(2);
  near << 0.5, 0.5 + 0.9e-9;
  CHECK_NOTHROW(SimplexState{near});
  near(1) = 0.5 + 1e-6;
  CHECK_THROWS_AS(SimplexState{near}, ValidationError);
}

TEST_CASE("interior predicate") {
  CHECK(barycenter(3).interior());
  CHECK(barycenter(3).interior(0.1));
  CHECK_FALSE(SimplexState(Eigen::Vector3d(1.0, 0.0, 0.0)).interior());
  CHECK_FALSE(SimplexState(Eigen::Vector3d(0.98, 0.01, 0.01)).interior(0.05));
}

TEST_CASE("barycenter") {
  const SimplexState b = barycenter(4);
  for (int i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(barycenter(1), ValidationError);
}

TEST_CASE("tangency predicate") {
  CHECK(is_tangent(Eigen::Vector3d(1.0, -0.5, -0.5)));
  CHECK_FALSE(is_tangent(Eigen::Vector3d(1.0, 0.0, 0.0)));
}

TEST_CASE("tangent basis is orthonormal and tangent for n up to 50") {
  for (int n = 2; n <= 50; ++n) {
    const TangentBasis basis = tangent_basis(n);
    REQUIRE(basis.N.rows() == n);
    REQUIRE(basis.N.cols() == n - 1);
    const MatrixXd gram = basis.N.transpose() * basis.N;
    CHECK((gram - MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((Eigen::RowVectorXd::Ones(n) * basis.N).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("tangent basis is deterministic and starts from the difference chain") {
  const TangentBasis a = tangent_basis(7);
  const TangentBasis b = tangent_basis(7);
  CHECK((a.N - b.N).cwiseAbs().maxCoeff() == 0.0);

  const TangentBasis two = tangent_basis(2);
  CHECK(two.N(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(two.N(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(tangent_basis(1), ValidationError);
}

TEST_CASE("rps payoff matrix layout") {
  const MatrixGame g = make_rps_game(2.0, 1.0);
  MatrixXd expect(3, 3);
  expect << 0, -1, 2, 2, 0, -1, -1, 2, 0;
  CHECK((g.A - expect).cwiseAbs().maxCoeff() == 0.0);

  const MatrixGame lossless = make_rps_game(1.0, 1.0);
  CHECK((lossless.A + lossless.A.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const MatrixGame nonpassive = make_rps_game(1.0, 2.0);
  CHECK((nonpassive.A + nonpassive.A.transpose()).cwiseAbs().maxCoeff() > 0.1);

  CHECK_THROWS_AS(make_rps_game(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_rps_game(1.0, -2.0), ValidationError);
}

TEST_CASE("matrix game evaluation") {
  const MatrixGame balanced = make_rps_game(1.0, 1.0);
  const VectorXd p0 = eval_matrix_game(balanced, barycenter(3));
  CHECK(p0.cwiseAbs().maxCoeff() <= 1e-15);

  const MatrixGame g = make_rps_game(2.0, 1.0);
  const VectorXd p1 = eval_matrix_game(g, SimplexState(Eigen::Vector3d(1.0, 0.0, 0.0)));
  CHECK(p1(0) == doctest::Approx(0.0));
  CHECK(p1(1) == doctest::Approx(2.0));
  CHECK(p1(2) == doctest::Approx(-1.0));

  MatrixGame bad;
  bad.A = MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("rps quadratic form closed form") {
  std::mt19937 rng(7001);
  std::uniform_real_distribution<double> wl(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double w = wl(rng), l = wl(rng);
    const MatrixGame g = make_rps_game(w, l);
    const VectorXd x = random_simplex_point(rng, 3);
    const double quad = x.dot(g.A * x);
    const double closed = (w - l) * (x(0) * x(1) + x(1) * x(2) + x(0) * x(2));
    CHECK(std::abs(quad - closed) <= 1e-12);
  }
}

TEST_CASE("matrix game evaluation is linear on the simplex") {
  std::mt19937 rng(7002);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  const MatrixGame g = make_rps_game(1.7, 0.4);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd x = random_simplex_point(rng, 3);
    const VectorXd y = random_simplex_point(rng, 3);
    const double a = mix(rng);
    const VectorXd blend = a * x + (1.0 - a) * y;
    const VectorXd lhs = eval_matrix_game(g, SimplexState(blend));
    const VectorXd rhs = a * eval_matrix_game(g, SimplexState(x)) +
                         (1.0 - a) * eval_matrix_game(g, SimplexState(y));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("lti game construction and validation") {
  LTIGame g = make_lti(MatrixXd::Identity(2, 2) * -1.0, MatrixXd::Identity(2, 2),
                       MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2));
  CHECK(g.state_dim() == 2);
  CHECK(g.input_dim() == 2);
  CHECK(g.z.cwiseAbs().maxCoeff() == 0.0);

  g.B = MatrixXd::Identity(3, 2);
  CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("lti output at the origin is the feedthrough") {
  // the two-channel example game: instantaneous response D u
  MatrixXd A(2, 2), I2 = MatrixXd::Identity(2, 2);
  A << -0.9, 0, 0, -1.2;
  const LTIGame g = make_lti(A, I2, I2, -3.0 * I2);
  const VectorXd p = g.output(VectorXd::Ones(2));
  CHECK(p(0) == doctest::Approx(-3.0));
  CHECK(p(1) == doctest::Approx(-3.0));

  const VectorXd zero = g.output(VectorXd::Zero(2));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lti stepping reaches the steady state of a constant input") {
  MatrixXd A(2, 2), I2 = MatrixXd::Identity(2, 2);
  A << -0.9, 0, 0, -1.2;
  LTIGame g = make_lti(A, I2, I2, -3.0 * I2);
  const VectorXd u = Eigen::Vector2d(0.3, 0.7);

  VectorXd p = g.output(u);
  const double dt = 0.01;
  for (int k = 0; k < 5000; ++k) p = step_lti_game(g, u, dt);

  const VectorXd z_star = (-A).lu().solve(u);
  const VectorXd p_star = z_star - 3.0 * u;  // C = I
  CHECK((g.z - z_star).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((p - p_star).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK_THROWS_AS(step_lti_game(g, VectorXd::Zero(3), dt), ValidationError);
  CHECK_THROWS_AS(step_lti_game(g, u, 0.0), ValidationError);
}

TEST_CASE("one lti step matches the matrix exponential update") {
  // single channel: z' = -z + u has exact solution; RK4 must agree to O(h^5)
  LTIGame g = make_lti(MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, 1.0),
                       MatrixXd::Constant(1, 1, 1.0), MatrixXd::Zero(1, 1));
  g.z = VectorXd::Constant(1, 2.0);
  const double h = 1e-2;
  step_lti_game(g, VectorXd::Constant(1, 0.5), h);
  const double exact = 0.5 + (2.0 - 0.5) * std::exp(-h);
  CHECK(std::abs(g.z(0) - exact) <= 1e-11);
}
