#ifndef EVODYN_DYNAMICS_HPP
#define EVODYN_DYNAMICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>

#include "evodyn/games.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

// rho(i,j) = rate of switching from strategy i to j, as a function of the
// current payoff vector and population state. Entries must be >= 0.
using RevisionProtocol =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& p, const SimplexState& x)>;

// Imitation of success: rho_ij = x_j (p_j - K). Admissible only while
// K <= min_j p_j (within 1e-12); worse payoffs would mean negative rates.
RevisionProtocol imitation_of_success(double K);

// x'_i = sum_j x_j rho_ji - x_i sum_j rho_ij  (inflow minus outflow).
Eigen::VectorXd mean_dynamic(const RevisionProtocol& protocol, const SimplexState& x,
                             const Eigen::VectorXd& p);

// x'_i = x_i (p_i - x.p)
Eigen::VectorXd standard_rd_field(const SimplexState& x, const Eigen::VectorXd& p);

// Interaction restricted to graph neighborhoods N_i:
//   x'_i = x_i ( p_i * sum_{j in N_i} x_j - sum_{j in N_i} x_j p_j )
// adjacency must be square, symmetric, 0/1.
Eigen::VectorXd local_graph_rd_field(const SimplexState& x, const Eigen::VectorXd& p,
                                     const Eigen::MatrixXd& adjacency);

// A_new = A - (A + A^T)/n_group, defined for n_group >= 3.
MatrixGame modified_payoff_matrix(const MatrixGame& g, int n_group);

// Standard field driven by the modified payoff A_new x.
Eigen::VectorXd local_modified_rd_field(const SimplexState& x, const MatrixGame& g,
                                        int n_group);

struct SecondOrderField {
  Eigen::VectorXd x_dot, p_hat_dot;
};

// x'_i = x_i (phat_i - x.phat),  phat' = p.
SecondOrderField second_order_rd_field(const SimplexState& x, const Eigen::VectorXd& p_hat,
                                       const Eigen::VectorXd& p);

struct LeadLagField {
  Eigen::VectorXd x_dot, p_hat_dot, y;
};

// First-order lag on the payoff plus direct feedthrough:
//   phat' = -phat/beta + p
//   y     = (1/beta - alpha/beta^2) phat + (alpha/beta) p
//   x'_i  = x_i (y_i - x.y)
// alpha = beta reduces the x-component to the standard field.
LeadLagField lead_lag_rd_field(const SimplexState& x, const Eigen::VectorXd& p_hat,
                               const Eigen::VectorXd& p, double alpha, double beta);

// Standard field driven by p - K.*x (per-strategy state feedback K >= 0).
Eigen::VectorXd passivated_rd_field(const SimplexState& x, const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& gain);

// ---- closed-loop dynamics selector ----

struct StandardRD {};
struct LocalGraphRD {
  Eigen::MatrixXd adjacency;
};
struct LocalModifiedRD {
  int n_group = 3;
};
struct SecondOrderRD {};
struct LeadLagRD {
  double alpha = 1.0, beta = 1.0;
};
struct PassivatedRD {
  Eigen::VectorXd gain;
};

struct DynamicsModel {
  std::variant<StandardRD, LocalGraphRD, LocalModifiedRD, SecondOrderRD, LeadLagRD,
               PassivatedRD>
      kind;

  int aux_dim(int n) const;   // payoff-memory states carried next to x
  std::string tag() const;
  void validate(int n) const;
};

namespace detail {
// Unvalidated kernels shared with the integrator hot path.
Eigen::VectorXd rd_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p);
Eigen::VectorXd local_graph_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                   const Eigen::MatrixXd& adjacency);
}  // namespace detail

}  // namespace evodyn

#endif
