#ifndef EVODYN_TRAJECTORY_HPP
#define EVODYN_TRAJECTORY_HPP

#include <Eigen/Dense>
#include <vector>

#include "evodyn/dynamics.hpp"

namespace evodyn {

// Joint state is stored as [ x | payoff memory | game state ].
struct StateLayout {
  int n = 0;    // strategies
  int aux = 0;  // integrated/filtered payoff states
  int nz = 0;   // dynamic-game states
  int total() const { return n + aux + nz; }
};

struct Trajectory {
  StateLayout layout;
  DynamicsModel dynamics;  // kept so ledgers can pick storage and supply forms
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;   // full joint state per recorded time
  std::vector<Eigen::VectorXd> payoffs;  // game output p per recorded time

  size_t samples() const { return times.size(); }
  Eigen::VectorXd x_at(size_t k) const { return states[k].head(layout.n); }
  Eigen::VectorXd aux_at(size_t k) const { return states[k].segment(layout.n, layout.aux); }
  Eigen::VectorXd z_at(size_t k) const { return states[k].tail(layout.nz); }
};

}  // namespace evodyn

#endif
