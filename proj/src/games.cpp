#include "evodyn/games.hpp"

#include <string>

namespace evodyn {

void MatrixGame::validate() const {
  if (A.rows() != A.cols()) {
    throw ValidationError("payoff matrix must be square, got " +
                          std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
  if (A.rows() < 2) throw ValidationError("payoff matrix needs n >= 2");
  if (!A.allFinite()) throw ValidationError("payoff matrix has non-finite entries");
}

MatrixGame make_rps_game(double w, double l) {
  if (!(w > 0.0)) throw ValidationError("rps win payoff must be > 0");
  if (!(l > 0.0)) throw ValidationError("rps loss payoff must be > 0");
  Eigen::MatrixXd A(3, 3);
  A << 0.0, -l, w,
       w, 0.0, -l,
       -l, w, 0.0;
  return MatrixGame{A};
}

Eigen::VectorXd eval_matrix_game(const MatrixGame& g, const SimplexState& x) {
  g.validate();
  if (g.n() != x.size()) {
    throw ValidationError("payoff matrix is " + std::to_string(g.n()) +
                          "x" + std::to_string(g.n()) + " but state has " +
                          std::to_string(x.size()) + " strategies");
  }
  return g.A * x.vec();
}

void LTIGame::validate() const {
  const auto nz = A.rows();
  const auto m = D.cols();
  if (A.cols() != nz) throw ValidationError("lti game: A must be square");
  if (B.rows() != nz || B.cols() != m) {
    throw ValidationError("lti game: B must be " + std::to_string(nz) + "x" + std::to_string(m));
  }
  if (C.rows() != m || C.cols() != nz) {
    throw ValidationError("lti game: C must be " + std::to_string(m) + "x" + std::to_string(nz));
  }
  if (D.rows() != m) throw ValidationError("lti game: D must be square");
  if (z.size() != nz) {
    throw ValidationError("lti game: z has " + std::to_string(z.size()) +
                          " entries, state dimension is " + std::to_string(nz));
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite() || !z.allFinite()) {
    throw ValidationError("lti game: non-finite entries");
  }
}

Eigen::VectorXd LTIGame::output(const Eigen::VectorXd& u) const {
  if (u.size() != input_dim()) {
    throw ValidationError("lti game: input has " + std::to_string(u.size()) +
                          " entries, expected " + std::to_string(input_dim()));
  }
  return C * z + D * u;
}

LTIGame make_lti(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D) {
  LTIGame g{std::move(A), std::move(B), std::move(C), std::move(D),
            Eigen::VectorXd::Zero(0)};
  g.z = Eigen::VectorXd::Zero(g.A.rows());
  g.validate();
  return g;
}

Eigen::VectorXd step_lti_game(LTIGame& g, const Eigen::VectorXd& u, double dt) {
  g.validate();
  if (!(dt > 0.0)) throw ValidationError("lti game: dt must be positive");
  if (u.size() != g.input_dim()) {
    throw ValidationError("lti game: input has " + std::to_string(u.size()) +
                          " entries, expected " + std::to_string(g.input_dim()));
  }
  const Eigen::VectorXd bu = g.B * u;
  const Eigen::VectorXd k1 = g.A * g.z + bu;
  const Eigen::VectorXd k2 = g.A * (g.z + 0.5 * dt * k1) + bu;
  const Eigen::VectorXd k3 = g.A * (g.z + 0.5 * dt * k2) + bu;
  const Eigen::VectorXd k4 = g.A * (g.z + dt * k3) + bu;
  g.z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return g.output(u);
}

}  // namespace evodyn
