#include "evodyn/interconnection.hpp"

#include <cmath>
#include <string>

namespace evodyn {

Eigen::VectorXd ClosedLoopSystem::payoff(const Eigen::VectorXd& s) const {
  const auto x = s.head(layout.n);
  if (const auto* mg = std::get_if<MatrixGame>(&game)) {
    return mg->A * x;
  }
  const auto& lti = std::get<LTIGame>(game);
  const auto z = s.tail(layout.nz);
  return lti.C * z + lti.D * (x - x_ref);
}

Eigen::VectorXd ClosedLoopSystem::field(const Eigen::VectorXd& s) const {
  const Eigen::VectorXd x = s.head(layout.n);
  const Eigen::VectorXd p = payoff(s);

  Eigen::VectorXd out(layout.total());
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StandardRD>) {
          out.head(layout.n) = detail::rd_kernel(x, p);
        } else if constexpr (std::is_same_v<T, LocalGraphRD>) {
          out.head(layout.n) = detail::local_graph_kernel(x, p, k.adjacency);
        } else if constexpr (std::is_same_v<T, LocalModifiedRD>) {
          // the group-size correction only reshapes the payoff seen by the
          // dynamics; the recorded game output stays p = A x
          out.head(layout.n) = detail::rd_kernel(x, p - sym_share_ * x);
        } else if constexpr (std::is_same_v<T, SecondOrderRD>) {
          const Eigen::VectorXd p_hat = s.segment(layout.n, layout.aux);
          out.head(layout.n) = detail::rd_kernel(x, p_hat);
          out.segment(layout.n, layout.aux) = p;
        } else if constexpr (std::is_same_v<T, LeadLagRD>) {
          const Eigen::VectorXd p_hat = s.segment(layout.n, layout.aux);
          const Eigen::VectorXd y =
              (1.0 / k.beta - k.alpha / (k.beta * k.beta)) * p_hat + (k.alpha / k.beta) * p;
          out.head(layout.n) = detail::rd_kernel(x, y);
          out.segment(layout.n, layout.aux) = -p_hat / k.beta + p;
        } else {  // PassivatedRD
          out.head(layout.n) = detail::rd_kernel(x, p - k.gain.cwiseProduct(x));
        }
      },
      dynamics.kind);

  if (const auto* lti = std::get_if<LTIGame>(&game)) {
    const auto z = s.tail(layout.nz);
    out.tail(layout.nz) = lti->A * z + lti->B * (x - x_ref);
  }
  return out;
}

ClosedLoopSystem assemble(DynamicsModel dynamics, GameModel game, const SimplexState& x0,
                          const std::optional<Eigen::VectorXd>& aux0,
                          const std::optional<Eigen::VectorXd>& x_ref) {
  const int n = x0.size();
  dynamics.validate(n);

  ClosedLoopSystem sys;
  sys.layout.n = n;
  sys.layout.aux = dynamics.aux_dim(n);

  if (const auto* mg = std::get_if<MatrixGame>(&game)) {
    mg->validate();
    if (mg->n() != n) {
      throw ValidationError("assemble: game has " + std::to_string(mg->n()) +
                            " strategies, x0 has " + std::to_string(n));
    }
    if (x_ref) throw ValidationError("assemble: x_ref applies only to dynamic games");
    sys.layout.nz = 0;
    if (const auto* lm = std::get_if<LocalModifiedRD>(&dynamics.kind)) {
      sys.sym_share_ = (mg->A + mg->A.transpose()) / static_cast<double>(lm->n_group);
    }
  } else {
    const auto& lti = std::get<LTIGame>(game);
    lti.validate();
    if (lti.input_dim() != n) {
      throw ValidationError("assemble: game input dimension " +
                            std::to_string(lti.input_dim()) + " does not match " +
                            std::to_string(n) + " strategies");
    }
    if (std::holds_alternative<LocalModifiedRD>(dynamics.kind)) {
      throw ValidationError("assemble: local modified rd needs a payoff matrix game");
    }
    sys.layout.nz = lti.state_dim();
    if (x_ref) {
      if (x_ref->size() != n) {
        throw ValidationError("assemble: x_ref has " + std::to_string(x_ref->size()) +
                              " entries, x0 has " + std::to_string(n));
      }
      sys.x_ref = *x_ref;
    } else {
      sys.x_ref = Eigen::VectorXd::Constant(n, 1.0 / n);
    }
  }

  sys.initial_state.resize(sys.layout.total());
  sys.initial_state.head(n) = x0.vec();
  if (sys.layout.aux > 0) {
    if (aux0) {
      if (aux0->size() != sys.layout.aux) {
        throw ValidationError("assemble: aux0 has " + std::to_string(aux0->size()) +
                              " entries, dynamics carries " + std::to_string(sys.layout.aux));
      }
      sys.initial_state.segment(n, sys.layout.aux) = *aux0;
    } else {
      sys.initial_state.segment(n, sys.layout.aux).setZero();
    }
  } else if (aux0 && aux0->size() != 0) {
    throw ValidationError("assemble: dynamics '" + dynamics.tag() +
                          "' carries no payoff memory, aux0 not allowed");
  }
  if (sys.layout.nz > 0) {
    sys.initial_state.tail(sys.layout.nz) = std::get<LTIGame>(game).z;
  }

  sys.dynamics = std::move(dynamics);
  sys.game = std::move(game);
  return sys;
}

Trajectory integrate(const ClosedLoopSystem& sys, const IntegratorConfig& cfg) {
  if (!(cfg.h > 0.0)) throw ValidationError("integrate: step size must be positive");
  if (!(cfg.T > 0.0)) throw ValidationError("integrate: horizon must be positive");
  if (cfg.record_stride < 1) throw ValidationError("integrate: record stride must be >= 1");
  if (cfg.direction != 1 && cfg.direction != -1) {
    throw ValidationError("integrate: direction must be +1 or -1");
  }

  const int n = sys.layout.n;
  const int dim = sys.layout.total();
  const long long n_full = static_cast<long long>(std::floor(cfg.T / cfg.h + 1e-9));
  const double rem = cfg.T - static_cast<double>(n_full) * cfg.h;
  const bool has_rem = rem > 1e-9 * cfg.h;

  Trajectory traj;
  traj.layout = sys.layout;
  traj.dynamics = sys.dynamics;

  Eigen::VectorXd s = sys.initial_state;
  Eigen::VectorXd comp = Eigen::VectorXd::Zero(dim);  // Kahan carry for the state sum
  Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), incr(dim);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.payoffs.push_back(sys.payoff(s));
  };
  record(0.0);

  const double sign = static_cast<double>(cfg.direction);
  double t = 0.0;
  for (long long step = 1; step <= n_full + (has_rem ? 1 : 0); ++step) {
    const double h = (step <= n_full) ? cfg.h : rem;
    k1 = sign * sys.field(s);
    k2 = sign * sys.field(s + (0.5 * h) * k1);
    k3 = sign * sys.field(s + (0.5 * h) * k2);
    k4 = sign * sys.field(s + h * k3);
    incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // compensated accumulation keeps the long-run storage drift at the
    // truncation order instead of the rounding floor
    for (int i = 0; i < dim; ++i) {
      const double y = incr(i) - comp(i);
      const double next = s(i) + y;
      comp(i) = (next - s(i)) - y;
      s(i) = next;
    }
    t = (step <= n_full) ? static_cast<double>(step) * cfg.h : cfg.T;

    if (!s.allFinite()) {
      throw NumericalError("integrate: non-finite state at t = " + std::to_string(t));
    }
    bool touched = false;
    for (int i = 0; i < n; ++i) {
      if (s(i) < 0.0) {
        if (s(i) <= -cfg.clamp_epsilon) {
          throw NumericalError("integrate: blowup, x_" + std::to_string(i + 1) + " = " +
                               std::to_string(s(i)) + " at t = " + std::to_string(t));
        }
        s(i) = 0.0;
        touched = true;
      }
    }
    const double sum = s.head(n).sum();
    if (touched || std::abs(sum - 1.0) > cfg.renormalize_threshold) {
      s.head(n) /= sum;
      comp.head(n).setZero();
    }

    if (step % cfg.record_stride == 0 || step == n_full + (has_rem ? 1 : 0)) {
      record(t);
    }
  }
  return traj;
}

double rest_point_residual(const ClosedLoopSystem& sys, const Eigen::VectorXd& state) {
  if (state.size() != sys.layout.total()) {
    throw ValidationError("rest point residual: state has " + std::to_string(state.size()) +
                          " entries, layout needs " + std::to_string(sys.layout.total()));
  }
  return sys.field(state).norm();
}

}  // namespace evodyn
