#ifndef EVODYN_INTERCONNECTION_HPP
#define EVODYN_INTERCONNECTION_HPP

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "evodyn/games.hpp"
#include "evodyn/trajectory.hpp"

namespace evodyn {

using GameModel = std::variant<MatrixGame, LTIGame>;

// Feedback loop: the game maps the population state to a payoff vector and the
// dynamics field consumes that payoff. Integrated as one joint state, never
// operator-split.
class ClosedLoopSystem {
 public:
  DynamicsModel dynamics;
  GameModel game;
  StateLayout layout;
  Eigen::VectorXd initial_state;

  // Dynamic games are driven by the deviation u = x - x_ref so that a rest
  // point (zero payoff at equilibrium) exists; defaults to the barycenter.
  // Unused for matrix games.
  Eigen::VectorXd x_ref;

  Eigen::VectorXd field(const Eigen::VectorXd& s) const;
  Eigen::VectorXd payoff(const Eigen::VectorXd& s) const;

 private:
  friend ClosedLoopSystem assemble(DynamicsModel, GameModel, const SimplexState&,
                                   const std::optional<Eigen::VectorXd>&,
                                   const std::optional<Eigen::VectorXd>&);
  Eigen::MatrixXd sym_share_;  // (A + A^T)/n_group, cached for the local-modified field
};

ClosedLoopSystem assemble(DynamicsModel dynamics, GameModel game, const SimplexState& x0,
                          const std::optional<Eigen::VectorXd>& aux0 = std::nullopt,
                          const std::optional<Eigen::VectorXd>& x_ref = std::nullopt);

struct IntegratorConfig {
  double T = 50.0;
  double h = 1e-3;
  int record_stride = 10;
  double renormalize_threshold = 1e-12;
  double clamp_epsilon = 1e-15;
  int direction = +1;  // -1 integrates the negated field (time reversal checks)
};

// Classical fixed-step RK4 on the joint state. After every step the simplex
// block is guarded: tiny negative entries are clamped to zero, the block is
// renormalized when its sum drifts past the threshold, larger violations stop
// the run. Records every record_stride-th step plus the initial and final one.
Trajectory integrate(const ClosedLoopSystem& sys, const IntegratorConfig& cfg);

// Euclidean norm of the full closed-loop field at the given joint state.
double rest_point_residual(const ClosedLoopSystem& sys, const Eigen::VectorXd& state);

}  // namespace evodyn

#endif
