#ifndef EVODYN_GAMES_HPP
#define EVODYN_GAMES_HPP

#include <Eigen/Dense>

#include "evodyn/simplex.hpp"

namespace evodyn {

// Population game given by a payoff matrix: p = A x.
struct MatrixGame {
  Eigen::MatrixXd A;

  int n() const { return static_cast<int>(A.rows()); }
  void validate() const;
};

// Rock-paper-scissors with win payoff w and loss payoff l:
//   row i plays against column j; beats the next strategy cyclically.
MatrixGame make_rps_game(double w, double l);

Eigen::VectorXd eval_matrix_game(const MatrixGame& g, const SimplexState& x);

// Dynamic game with internal state z:
//   z' = A z + B u,  p = C z + D u.
// An instance carries its own z and is confined to one simulation run.
struct LTIGame {
  Eigen::MatrixXd A, B, C, D;
  Eigen::VectorXd z;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(D.cols()); }
  void validate() const;

  // Output map at the current z, no state advance.
  Eigen::VectorXd output(const Eigen::VectorXd& u) const;
};

// One fixed-step RK4 advance of z holding u constant over dt; returns the
// output at the new state. Inside a closed loop the joint integrator owns the
// stepping instead.
Eigen::VectorXd step_lti_game(LTIGame& g, const Eigen::VectorXd& u, double dt);

// Convenience: build an LTIGame with z = 0 (transfer-function use).
LTIGame make_lti(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D);

}  // namespace evodyn

#endif
