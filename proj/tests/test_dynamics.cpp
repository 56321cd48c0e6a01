#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "evodyn/dynamics.hpp"

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

VectorXd random_payoff(std::mt19937& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = g(rng);
  return p;
}

}  // namespace

TEST_CASE("zero protocol gives a zero mean dynamic") {
  const RevisionProtocol silent = [](const VectorXd& p, const SimplexState& x) {
    (void)p;
    return MatrixXd::Zero(x.size(), x.size()).eval();
  };
  const SimplexState x(Eigen::Vector3d(0.5, 0.25, 0.25));
  const VectorXd field = mean_dynamic(silent, x, VectorXd::Zero(3));
  CHECK(field.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("imitation of success reproduces the standard field") {
  std::mt19937 rng(7101);
  for (int trial = 0; trial < 100; ++trial) {
    const SimplexState x{random_simplex_point(rng, 3)};
    const VectorXd p = random_payoff(rng, 3);
    const double k_max = p.minCoeff();

    const VectorXd via_protocol = mean_dynamic(imitation_of_success(k_max), x, p);
    const VectorXd direct = standard_rd_field(x, p);
    CHECK((via_protocol - direct).cwiseAbs().maxCoeff() <= 1e-12);

    // the constant K cancels between inflow and outflow
    const VectorXd shifted = mean_dynamic(imitation_of_success(k_max - 5.0), x, p);
    CHECK((via_protocol - shifted).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("imitation of success rate matrix") {
  const VectorXd p = Eigen::Vector3d(1.0, 0.0, 0.0);

  // monomorphic on the worst strategy: the populated column has zero advantage
  // over K = min p, the rest have zero mass
  const MatrixXd at_vertex =
      imitation_of_success(p.minCoeff())(p, SimplexState(Eigen::Vector3d(0.0, 0.0, 1.0)));
  CHECK(at_vertex.cwiseAbs().maxCoeff() == 0.0);

  const MatrixXd rho =
      imitation_of_success(0.0)(p, SimplexState(Eigen::Vector3d(0.5, 0.5, 0.0)));
  for (int i = 0; i < 3; ++i) {
    CHECK(rho(i, 0) == doctest::Approx(0.5));
    CHECK(rho(i, 1) == 0.0);
    CHECK(rho(i, 2) == 0.0);
  }

  // K above some payoff would mean a negative switch rate
  CHECK_THROWS_AS(imitation_of_success(0.5)(p, SimplexState(Eigen::Vector3d(0.5, 0.5, 0.0))),
                  DomainError);
}

TEST_CASE("mean dynamic rejects negative switch rates") {
  const RevisionProtocol bad = [](const VectorXd&, const SimplexState& x) {
    return (-MatrixXd::Ones(x.size(), x.size())).eval();
  };
  CHECK_THROWS_AS(mean_dynamic(bad, barycenter(3), VectorXd::Zero(3)), DomainError);

  const RevisionProtocol wrong_shape = [](const VectorXd&, const SimplexState&) {
    return MatrixXd::Zero(2, 2).eval();
  };
  CHECK_THROWS_AS(mean_dynamic(wrong_shape, barycenter(3), VectorXd::Zero(3)),
                  ValidationError);
}

TEST_CASE("standard replicator field") {
  const SimplexState x(Eigen::Vector3d(0.5, 0.5, 0.0));
  const VectorXd f = standard_rd_field(x, Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(f(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f(1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(f(2) == 0.0);

  // uniform payoff carries no advantage
  const VectorXd flat = standard_rd_field(barycenter(4), VectorXd::Constant(4, 3.7));
  CHECK(flat.cwiseAbs().maxCoeff() <= 1e-15);

  const MatrixGame rps = make_rps_game(1.0, 1.0);
  const VectorXd rest = standard_rd_field(barycenter(3), eval_matrix_game(rps, barycenter(3)));
  CHECK(rest.cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(standard_rd_field(x, VectorXd::Zero(4)), ValidationError);
}

TEST_CASE("local graph field reductions") {
  std::mt19937 rng(7102);
  const MatrixXd complete = MatrixXd::Ones(3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const SimplexState x{random_simplex_point(rng, 3)};
    const VectorXd p = random_payoff(rng, 3);
    const VectorXd local = local_graph_rd_field(x, p, complete);
    const VectorXd standard = standard_rd_field(x, p);
    CHECK((local - standard).cwiseAbs().maxCoeff() <= 1e-12);
  }

  const SimplexState x(Eigen::Vector3d(0.5, 0.5, 0.0));
  const VectorXd p = Eigen::Vector3d(1.0, 0.0, 0.0);
  CHECK(local_graph_rd_field(x, p, MatrixXd::Zero(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(local_graph_rd_field(x, p, MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("local graph adjacency validation") {
  const SimplexState x = barycenter(3);
  const VectorXd p = VectorXd::Zero(3);
  CHECK_THROWS_AS(local_graph_rd_field(x, p, MatrixXd::Ones(2, 2)), ValidationError);
  MatrixXd weighted = MatrixXd::Ones(3, 3);
  weighted(0, 1) = 0.5;
  CHECK_THROWS_AS(local_graph_rd_field(x, p, weighted), ValidationError);
  MatrixXd directed = MatrixXd::Zero(3, 3);
  directed(0, 1) = 1.0;
  CHECK_THROWS_AS(local_graph_rd_field(x, p, directed), ValidationError);
}

TEST_CASE("modified payoff matrix") {
  const MatrixGame skew = make_rps_game(1.0, 1.0);
  CHECK((modified_payoff_matrix(skew, 5).A - skew.A).cwiseAbs().maxCoeff() == 0.0);

  MatrixGame sym;
  sym.A = MatrixXd::Ones(3, 3);
  const MatrixGame shrunk = modified_payoff_matrix(sym, 4);
  CHECK((shrunk.A - 0.5 * sym.A).cwiseAbs().maxCoeff() <= 1e-15);

  const MatrixGame g = make_rps_game(2.0, 1.0);
  const MatrixGame far = modified_payoff_matrix(g, 1000);
  CHECK((far.A - g.A).cwiseAbs().maxCoeff() <= 2.0 * g.A.cwiseAbs().maxCoeff() / 1000.0);

  CHECK_THROWS_AS(modified_payoff_matrix(g, 2), ValidationError);
}

TEST_CASE("local modified field composes the two pieces") {
  const MatrixGame g = make_rps_game(2.0, 1.0);
  const SimplexState x = barycenter(3);
  const MatrixGame mod = modified_payoff_matrix(g, 4);
  const VectorXd expect = standard_rd_field(x, mod.A * x.vec());
  CHECK((local_modified_rd_field(x, g, 4) - expect).cwiseAbs().maxCoeff() <= 1e-15);

  const MatrixGame skew = make_rps_game(1.0, 1.0);
  const SimplexState y(Eigen::Vector3d(0.6, 0.3, 0.1));
  CHECK((local_modified_rd_field(y, skew, 7) -
         standard_rd_field(y, skew.A * y.vec()))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
}

TEST_CASE("second order field splits into state and payoff memory") {
  const SimplexState x(Eigen::Vector3d(0.5, 0.5, 0.0));
  const VectorXd p = Eigen::Vector3d(0.3, -0.1, 0.8);

  const SecondOrderField flat = second_order_rd_field(x, VectorXd::Constant(3, 2.0), p);
  CHECK(flat.x_dot.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((flat.p_hat_dot - p).cwiseAbs().maxCoeff() == 0.0);

  const SecondOrderField f =
      second_order_rd_field(x, Eigen::Vector3d(1.0, 0.0, 0.0), VectorXd::Zero(3));
  CHECK(f.x_dot(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f.x_dot(1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(f.x_dot(2) == 0.0);
  CHECK(f.p_hat_dot.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lead lag field matches the printed equations") {
  const SimplexState x(Eigen::Vector3d(0.5, 0.5, 0.0));

  const LeadLagField f =
      lead_lag_rd_field(x, Eigen::Vector3d(1.0, 0.0, 0.0), VectorXd::Zero(3), 2.0, 1.0);
  CHECK(f.p_hat_dot(0) == doctest::Approx(-1.0));
  CHECK(f.y(0) == doctest::Approx(-1.0));
  CHECK(f.y(1) == 0.0);

  // alpha = beta: the p_hat coefficient of y vanishes, so y = p for any p_hat
  std::mt19937 rng(7103);
  for (int trial = 0; trial < 50; ++trial) {
    const SimplexState xr{random_simplex_point(rng, 3)};
    const VectorXd p = random_payoff(rng, 3);
    const VectorXd ph = random_payoff(rng, 3);
    const LeadLagField g = lead_lag_rd_field(xr, ph, p, 1.5, 1.5);
    CHECK((g.y - p).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((g.x_dot - standard_rd_field(xr, p)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  // filter equilibrium p_hat = beta p passes p straight through
  const double alpha = 0.7, beta = 2.5;
  const VectorXd p = Eigen::Vector3d(0.4, -0.2, 0.9);
  const LeadLagField eq = lead_lag_rd_field(barycenter(3), beta * p, p, alpha, beta);
  CHECK((eq.y - p).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(lead_lag_rd_field(x, VectorXd::Zero(3), VectorXd::Zero(3), 0.0, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(lead_lag_rd_field(x, VectorXd::Zero(3), VectorXd::Zero(3), 1.0, -2.0),
                  ValidationError);
}

TEST_CASE("passivated field subtracts the state feedback") {
  const SimplexState x(Eigen::Vector3d(0.5, 0.5, 0.0));
  const VectorXd p = Eigen::Vector3d(1.0, 0.0, 0.0);

  const VectorXd zero_gain = passivated_rd_field(x, p, VectorXd::Zero(3));
  CHECK((zero_gain - standard_rd_field(x, p)).cwiseAbs().maxCoeff() == 0.0);

  const VectorXd f = passivated_rd_field(x, p, VectorXd::Ones(3));
  CHECK(f(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f(1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(f(2) == 0.0);

  // no payoff, uniform gain: the field pushes toward the support barycenter
  const SimplexState skewed(Eigen::Vector3d(0.7, 0.2, 0.1));
  const VectorXd pull = passivated_rd_field(skewed, VectorXd::Zero(3), VectorXd::Ones(3));
  CHECK(pull(0) < 0.0);
  CHECK(pull(2) > 0.0);
  CHECK((pull - standard_rd_field(skewed, -skewed.vec())).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(passivated_rd_field(x, p, Eigen::Vector3d(1.0, -1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(passivated_rd_field(x, p, VectorXd::Ones(2)), ValidationError);
}

TEST_CASE("every x field is tangent to the simplex") {
  std::mt19937 rng(7104);
  const MatrixXd ring = (MatrixXd(4, 4) << 0, 1, 0, 1,
                                           1, 0, 1, 0,
                                           0, 1, 0, 1,
                                           1, 0, 1, 0).finished();
  const MatrixGame g4{(MatrixXd(4, 4) << 0, 1, -1, 2,
                                         -1, 0, 1, 0,
                                         1, -1, 0, 1,
                                         0, 2, -2, 0).finished()};
  for (int trial = 0; trial < 1000; ++trial) {
    const SimplexState x{random_simplex_point(rng, 4)};
    const VectorXd p = random_payoff(rng, 4);
    const VectorXd ph = random_payoff(rng, 4);

    CHECK(std::abs(standard_rd_field(x, p).sum()) <= 1e-12);
    CHECK(std::abs(local_graph_rd_field(x, p, ring).sum()) <= 1e-12);
    CHECK(std::abs(local_modified_rd_field(x, g4, 5).sum()) <= 1e-12);
    CHECK(std::abs(second_order_rd_field(x, ph, p).x_dot.sum()) <= 1e-12);
    CHECK(std::abs(lead_lag_rd_field(x, ph, p, 2.0, 1.0).x_dot.sum()) <= 1e-12);
    CHECK(std::abs(passivated_rd_field(x, p, VectorXd::Ones(4)).sum()) <= 1e-12);
    CHECK(std::abs(mean_dynamic(imitation_of_success(p.minCoeff()), x, p).sum()) <= 1e-12);
  }
}

TEST_CASE("extinct strategies stay extinct") {
  std::mt19937 rng(7105);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd raw = random_simplex_point(rng, 4);
    raw(1) = 0.0;
    raw /= raw.sum();
    const SimplexState x{raw};
    const VectorXd p = random_payoff(rng, 4);
    const VectorXd ph = random_payoff(rng, 4);

    CHECK(standard_rd_field(x, p)(1) == 0.0);
    CHECK(local_graph_rd_field(x, p, MatrixXd::Ones(4, 4))(1) == 0.0);
    CHECK(second_order_rd_field(x, ph, p).x_dot(1) == 0.0);
    CHECK(lead_lag_rd_field(x, ph, p, 0.5, 1.0).x_dot(1) == 0.0);
    CHECK(passivated_rd_field(x, p, VectorXd::Ones(4))(1) == 0.0);
  }
}

TEST_CASE("dynamics model bookkeeping") {
  CHECK(DynamicsModel{StandardRD{}}.aux_dim(3) == 0);
  CHECK(DynamicsModel{LocalModifiedRD{4}}.aux_dim(3) == 0);
  CHECK(DynamicsModel{PassivatedRD{VectorXd::Ones(3)}}.aux_dim(3) == 0);
  CHECK(DynamicsModel{SecondOrderRD{}}.aux_dim(3) == 3);
  CHECK(DynamicsModel{LeadLagRD{2.0, 1.0}}.aux_dim(5) == 5);

  CHECK(DynamicsModel{StandardRD{}}.tag() == "standard");
  CHECK(DynamicsModel{LocalGraphRD{MatrixXd::Ones(3, 3)}}.tag() == "local_graph");
  CHECK(DynamicsModel{LocalModifiedRD{4}}.tag() == "local_modified");
  CHECK(DynamicsModel{SecondOrderRD{}}.tag() == "second_order");
  CHECK(DynamicsModel{LeadLagRD{}}.tag() == "lead_lag");
  CHECK(DynamicsModel{PassivatedRD{VectorXd::Ones(3)}}.tag() == "passivated");

  CHECK_THROWS_AS(DynamicsModel{LocalModifiedRD{2}}.validate(3), ValidationError);
  CHECK_THROWS_AS((DynamicsModel{LeadLagRD{-1.0, 1.0}}.validate(3)), ValidationError);
  CHECK_THROWS_AS(DynamicsModel{LocalGraphRD{MatrixXd::Ones(2, 2)}}.validate(3),
                  ValidationError);
  CHECK_THROWS_AS(DynamicsModel{PassivatedRD{VectorXd::Ones(2)}}.validate(3), ValidationError);
  CHECK_NOTHROW(DynamicsModel{SecondOrderRD{}}.validate(3));
}
