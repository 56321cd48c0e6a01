#include "evodyn/dynamics.hpp"

#include <cmath>

namespace evodyn {

namespace detail {

Eigen::VectorXd rd_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  const double mean = x.dot(p);
  return (x.array() * (p.array() - mean)).matrix();
}

Eigen::VectorXd local_graph_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                   const Eigen::MatrixXd& adjacency) {
  // neighborhood mass and neighborhood-weighted payoff in one pass
  const Eigen::VectorXd mass = adjacency * x;
  const Eigen::VectorXd weighted = adjacency * x.cwiseProduct(p);
  return x.cwiseProduct(p.cwiseProduct(mass) - weighted);
}

}  // namespace detail

static void check_payoff(const Eigen::VectorXd& p, int n, const char* what) {
  if (p.size() != n) {
    throw ValidationError(std::string(what) + ": payoff has " + std::to_string(p.size()) +
                          " entries, state has " + std::to_string(n));
  }
  if (!p.allFinite()) throw ValidationError(std::string(what) + ": payoff is non-finite");
}

RevisionProtocol imitation_of_success(double K) {
  if (!std::isfinite(K)) throw ValidationError("imitation protocol: aspiration must be finite");
  return [K](const Eigen::VectorXd& p, const SimplexState& x) {
    const int n = x.size();
    check_payoff(p, n, "imitation protocol");
    if (p.minCoeff() < K - 1e-12) {
      throw DomainError("imitation protocol: payoff " + std::to_string(p.minCoeff()) +
                        " below aspiration " + std::to_string(K) +
                        " would give a negative switch rate");
    }
    Eigen::MatrixXd rho(n, n);
    for (int j = 0; j < n; ++j) {
      const double col = std::max(0.0, x[j] * (p(j) - K));
      rho.col(j).setConstant(col);
    }
    return rho;
  };
}

Eigen::VectorXd mean_dynamic(const RevisionProtocol& protocol, const SimplexState& x,
                             const Eigen::VectorXd& p) {
  const int n = x.size();
  check_payoff(p, n, "mean dynamic");
  const Eigen::MatrixXd rho = protocol(p, x);
  if (rho.rows() != n || rho.cols() != n) {
    throw ValidationError("mean dynamic: protocol returned " + std::to_string(rho.rows()) +
                          "x" + std::to_string(rho.cols()) + ", expected " +
                          std::to_string(n) + "x" + std::to_string(n));
  }
  if (rho.minCoeff() < -1e-12) {
    throw DomainError("mean dynamic: protocol produced a negative switch rate " +
                      std::to_string(rho.minCoeff()));
  }
  // inflow_i = sum_j x_j rho_ji, outflow_i = x_i sum_j rho_ij
  const Eigen::VectorXd inflow = rho.transpose() * x.vec();
  const Eigen::VectorXd outflow = x.vec().cwiseProduct(rho.rowwise().sum());
  return inflow - outflow;
}

Eigen::VectorXd standard_rd_field(const SimplexState& x, const Eigen::VectorXd& p) {
  check_payoff(p, x.size(), "standard rd");
  return detail::rd_kernel(x.vec(), p);
}

static void check_adjacency(const Eigen::MatrixXd& adjacency, int n) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ValidationError("adjacency must be square, got " + std::to_string(adjacency.rows()) +
                          "x" + std::to_string(adjacency.cols()));
  }
  if (adjacency.rows() != n) {
    throw ValidationError("adjacency is " + std::to_string(adjacency.rows()) +
                          "x" + std::to_string(adjacency.cols()) + " but state has " +
                          std::to_string(n) + " strategies");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0) {
        throw ValidationError("adjacency entries must be 0 or 1");
      }
      if (adjacency(j, i) != a) {
        throw ValidationError("adjacency must be symmetric (undirected interactions)");
      }
    }
  }
}

Eigen::VectorXd local_graph_rd_field(const SimplexState& x, const Eigen::VectorXd& p,
                                     const Eigen::MatrixXd& adjacency) {
  check_payoff(p, x.size(), "local graph rd");
  check_adjacency(adjacency, x.size());
  return detail::local_graph_kernel(x.vec(), p, adjacency);
}

MatrixGame modified_payoff_matrix(const MatrixGame& g, int n_group) {
  g.validate();
  if (n_group < 3) {
    throw ValidationError("modified payoff matrix needs group size >= 3, got " +
                          std::to_string(n_group));
  }
  return MatrixGame{g.A - (g.A + g.A.transpose()) / static_cast<double>(n_group)};
}

Eigen::VectorXd local_modified_rd_field(const SimplexState& x, const MatrixGame& g,
                                        int n_group) {
  const MatrixGame modified = modified_payoff_matrix(g, n_group);
  if (modified.n() != x.size()) {
    throw ValidationError("local modified rd: game is " + std::to_string(modified.n()) +
                          "x" + std::to_string(modified.n()) + " but state has " +
                          std::to_string(x.size()) + " strategies");
  }
  return detail::rd_kernel(x.vec(), modified.A * x.vec());
}

SecondOrderField second_order_rd_field(const SimplexState& x, const Eigen::VectorXd& p_hat,
                                       const Eigen::VectorXd& p) {
  check_payoff(p, x.size(), "second order rd");
  check_payoff(p_hat, x.size(), "second order rd (integrated payoff)");
  return SecondOrderField{detail::rd_kernel(x.vec(), p_hat), p};
}

LeadLagField lead_lag_rd_field(const SimplexState& x, const Eigen::VectorXd& p_hat,
                               const Eigen::VectorXd& p, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ValidationError("lead-lag rd: alpha and beta must be positive");
  }
  check_payoff(p, x.size(), "lead-lag rd");
  check_payoff(p_hat, x.size(), "lead-lag rd (filter state)");
  LeadLagField out;
  out.p_hat_dot = -p_hat / beta + p;
  out.y = (1.0 / beta - alpha / (beta * beta)) * p_hat + (alpha / beta) * p;
  out.x_dot = detail::rd_kernel(x.vec(), out.y);
  return out;
}

Eigen::VectorXd passivated_rd_field(const SimplexState& x, const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& gain) {
  check_payoff(p, x.size(), "passivated rd");
  if (gain.size() != x.size()) {
    throw ValidationError("passivated rd: gain has " + std::to_string(gain.size()) +
                          " entries, state has " + std::to_string(x.size()));
  }
  if (gain.minCoeff() < 0.0) throw ValidationError("passivated rd: gains must be >= 0");
  return detail::rd_kernel(x.vec(), p - gain.cwiseProduct(x.vec()));
}

int DynamicsModel::aux_dim(int n) const {
  if (std::holds_alternative<SecondOrderRD>(kind) || std::holds_alternative<LeadLagRD>(kind)) {
    return n;
  }
  return 0;
}

std::string DynamicsModel::tag() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StandardRD>) return "standard";
        else if constexpr (std::is_same_v<T, LocalGraphRD>) return "local_graph";
        else if constexpr (std::is_same_v<T, LocalModifiedRD>) return "local_modified";
        else if constexpr (std::is_same_v<T, SecondOrderRD>) return "second_order";
        else if constexpr (std::is_same_v<T, LeadLagRD>) return "lead_lag";
        else return "passivated";
      },
      kind);
}

void DynamicsModel::validate(int n) const {
  if (const auto* lg = std::get_if<LocalGraphRD>(&kind)) {
    check_adjacency(lg->adjacency, n);
  } else if (const auto* lm = std::get_if<LocalModifiedRD>(&kind)) {
    if (lm->n_group < 3) throw ValidationError("local modified rd: group size must be >= 3");
  } else if (const auto* ll = std::get_if<LeadLagRD>(&kind)) {
    if (!(ll->alpha > 0.0) || !(ll->beta > 0.0)) {
      throw ValidationError("lead-lag rd: alpha and beta must be positive");
    }
  } else if (const auto* pv = std::get_if<PassivatedRD>(&kind)) {
    if (pv->gain.size() != n) {
      throw ValidationError("passivated rd: gain has " + std::to_string(pv->gain.size()) +
                            " entries, state has " + std::to_string(n));
    }
    if (pv->gain.minCoeff() < 0.0) throw ValidationError("passivated rd: gains must be >= 0");
  }
}

}  // namespace evodyn
