#include "evodyn/certification.hpp"

#include <algorithm>
#include <cmath>

namespace evodyn {

namespace {

constexpr double kLedgerInteriorGuard = 1e-9;
constexpr double kPoleAxisTol = 1e-9;
constexpr double kGridPoleClearance = 1e-6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double storage_standard(const SimplexState& x, const SimplexState& x_star) {
  if (x.size() != x_star.size()) {
    throw ValidationError("storage: state has " + std::to_string(x.size()) +
                          " entries, reference has " + std::to_string(x_star.size()));
  }
  if (!x_star.interior()) {
    throw ValidationError("storage: reference point must be interior");
  }
  double v = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) {
      throw DomainError("storage: x_" + std::to_string(i + 1) +
                        " is on the simplex boundary");
    }
    v -= x_star[i] * std::log(x[i] / x_star[i]);
  }
  return v;
}

double storage_local(const SimplexState& x, const SimplexState& x_star, int n_group) {
  if (n_group < 3) {
    throw ValidationError("local storage needs group size >= 3, got " +
                          std::to_string(n_group));
  }
  const double scale = static_cast<double>(n_group) / (n_group - 2);
  return scale * storage_standard(x, x_star);
}

const char* to_string(SupplyKind k) {
  switch (k) {
    case SupplyKind::Payoff: return "payoff";
    case SupplyKind::EffectivePayoff: return "effective_payoff";
    default: return "integrated_payoff";
  }
}

double DissipationLedger::max_abs_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double DissipationLedger::max_storage_drift() const {
  if (storage.empty()) return 0.0;
  double m = 0.0;
  for (double v : storage) m = std::max(m, std::abs(v - storage.front()));
  return m;
}

DissipationLedger passivity_ledger(const Trajectory& traj, const SimplexState& x_star,
                                   SupplyKind kind) {
  const int n = traj.layout.n;
  if (x_star.size() != n) {
    throw ValidationError("ledger: reference has " + std::to_string(x_star.size()) +
                          " entries, trajectory has " + std::to_string(n) + " strategies");
  }
  if (traj.samples() == 0) throw ValidationError("ledger: empty trajectory");

  const auto* passivated = std::get_if<PassivatedRD>(&traj.dynamics.kind);
  if (kind == SupplyKind::EffectivePayoff && passivated == nullptr) {
    throw ValidationError(
        "ledger: effective_payoff supply needs the passivated dynamics (no gain available)");
  }
  if (kind == SupplyKind::IntegratedPayoff &&
      !std::holds_alternative<SecondOrderRD>(traj.dynamics.kind)) {
    throw ValidationError(
        "ledger: integrated_payoff supply needs the second-order dynamics");
  }
  const auto* local_modified = std::get_if<LocalModifiedRD>(&traj.dynamics.kind);

  // stop at the first sample too close to the boundary; finite books only
  size_t end = traj.samples();
  bool truncated = false;
  for (size_t k = 0; k < traj.samples(); ++k) {
    if (traj.x_at(k).minCoeff() < kLedgerInteriorGuard) {
      end = k;
      truncated = true;
      break;
    }
  }
  if (end == 0) {
    throw DomainError("ledger: trajectory starts on the simplex boundary (t = " +
                      fmt(traj.times.front()) + ", min x < 1e-9)");
  }

  DissipationLedger led;
  led.truncated = truncated;
  led.times.reserve(end);
  led.storage.reserve(end);
  led.supply.reserve(end);
  led.cumulative_supply.reserve(end);
  led.residual.reserve(end);

  for (size_t k = 0; k < end; ++k) {
    const Eigen::VectorXd x = traj.x_at(k);
    const SimplexState xs{x};
    const double v = local_modified ? storage_local(xs, x_star, local_modified->n_group)
                                    : storage_standard(xs, x_star);
    const Eigen::VectorXd e = x - x_star.vec();
    double s = 0.0;
    switch (kind) {
      case SupplyKind::Payoff:
        s = e.dot(traj.payoffs[k]);
        break;
      case SupplyKind::EffectivePayoff:
        s = e.dot(traj.payoffs[k] - passivated->gain.cwiseProduct(x));
        break;
      case SupplyKind::IntegratedPayoff:
        s = e.dot(traj.aux_at(k));
        break;
    }
    led.times.push_back(traj.times[k]);
    led.storage.push_back(v);
    led.supply.push_back(s);
    if (k == 0) {
      led.cumulative_supply.push_back(0.0);
    } else {
      const double dt = led.times[k] - led.times[k - 1];
      led.cumulative_supply.push_back(led.cumulative_supply[k - 1] +
                                      0.5 * dt * (led.supply[k] + led.supply[k - 1]));
    }
    led.residual.push_back(led.storage[k] - led.storage[0] - led.cumulative_supply[k]);
  }
  led.t_guard = led.times.back();
  return led;
}

const char* to_string(GameClass c) {
  switch (c) {
    case GameClass::StrictlyPassive: return "strictly_passive";
    case GameClass::Lossless: return "lossless";
    case GameClass::NonPassive: return "non_passive";
    default: return "indefinite";
  }
}

GameClassification classify_matrix_game(const MatrixGame& g, double tol) {
  g.validate();
  if (!(tol > 0.0)) throw ValidationError("classify: tolerance must be positive");
  const TangentBasis basis = tangent_basis(g.n());
  const Eigen::MatrixXd sym = (g.A + g.A.transpose()) / 2.0;
  Eigen::MatrixXd M = basis.N.transpose() * sym * basis.N;
  M = ((M + M.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd eigs = es.eigenvalues();
  const double lo = eigs(0), hi = eigs(eigs.size() - 1);

  GameClass verdict;
  if (std::max(std::abs(lo), std::abs(hi)) <= tol) {
    verdict = GameClass::Lossless;
  } else if (hi < -tol) {
    verdict = GameClass::StrictlyPassive;
  } else if (lo > tol) {
    verdict = GameClass::NonPassive;
  } else {
    verdict = GameClass::Indefinite;
  }
  return GameClassification{verdict, eigs};
}

LeadLagResponse lead_lag_frequency_response(double alpha, double beta, double omega) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ValidationError("lead-lag response: alpha and beta must be positive");
  }
  if (!(omega > 0.0)) throw ValidationError("lead-lag response: omega must be positive");

  const std::complex<double> jw(0.0, omega);
  const std::complex<double> value = (1.0 + alpha * jw) / (jw * (1.0 + beta * jw));
  const double b2w2 = beta * beta * omega * omega;
  const double re = beta * (alpha / beta - 1.0) / (b2w2 + 1.0);
  const double im = -(alpha * beta * omega * omega + 1.0) / (b2w2 * omega + omega);

  // closed forms and the direct evaluation must coincide; tolerance is
  // relative above magnitude 1 (|Im| grows like 1/w near w = 0)
  const double re_gap = std::abs(value.real() - re);
  const double im_gap = std::abs(value.imag() - im);
  if (re_gap > 1e-12 * std::max(1.0, std::abs(re)) ||
      im_gap > 1e-12 * std::max(1.0, std::abs(im))) {
    throw NumericalError("lead-lag response: closed form disagrees with direct evaluation at omega = " +
                         fmt(omega));
  }
  return LeadLagResponse{value, re, im};
}

const char* to_string(LeadLagClass c) {
  return c == LeadLagClass::PassiveAndNI ? "passive_and_NI" : "NI_only";
}

LeadLagClassification classify_lead_lag(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ValidationError("lead-lag classify: alpha and beta must be positive");
  }
  LeadLagClassification out;
  out.lossless_real_part = (alpha == beta);
  out.verdict = (alpha / beta > 1.0) ? LeadLagClass::PassiveAndNI : LeadLagClass::NIOnly;

  for (double w : FrequencyGrid{}.omegas()) {
    const LeadLagResponse r = lead_lag_frequency_response(alpha, beta, w);
    if (!(r.im_closed_form < 0.0)) {
      throw NumericalError("lead-lag classify: imaginary part not negative at omega = " + fmt(w));
    }
    const bool re_ok = (alpha > beta)   ? r.re_closed_form > 0.0
                       : (alpha < beta) ? r.re_closed_form < 0.0
                                        : std::abs(r.re_closed_form) <= 1e-15;
    if (!re_ok) {
      throw NumericalError("lead-lag classify: real-part sign contradicts the verdict at omega = " +
                           fmt(w));
    }
  }
  return out;
}

std::vector<double> FrequencyGrid::omegas() const {
  if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
    throw ValidationError("frequency grid: need 0 < omega_min < omega_max");
  }
  if (points < 2) throw ValidationError("frequency grid: need at least 2 points");
  std::vector<double> w(points);
  const double lo = std::log10(omega_min), hi = std::log10(omega_max);
  for (int k = 0; k < points; ++k) {
    w[k] = std::pow(10.0, lo + (hi - lo) * k / (points - 1));
  }
  return w;
}

const char* to_string(FrequencyCheckKind k) {
  switch (k) {
    case FrequencyCheckKind::NI: return "NI";
    case FrequencyCheckKind::SNI: return "SNI";
    default: return "passive";
  }
}

FrequencySample frequency_sample(const LTIGame& sys, double omega) {
  sys.validate();
  if (!(omega > 0.0)) throw ValidationError("frequency sample: omega must be positive");
  const std::complex<double> jw(0.0, omega);
  Eigen::MatrixXcd resolvent = -sys.A.cast<std::complex<double>>();
  resolvent.diagonal().array() += jw;
  FrequencySample s;
  s.omega = omega;
  s.G = sys.C.cast<std::complex<double>>() *
            resolvent.partialPivLu().solve(sys.B.cast<std::complex<double>>()) +
        sys.D.cast<std::complex<double>>();
  if (!s.G.allFinite()) {
    throw NumericalError("frequency sample: response not finite at omega = " + fmt(omega));
  }
  const std::complex<double> j(0.0, 1.0);
  s.ni_indicator = j * (s.G - s.G.adjoint());
  if ((s.ni_indicator - s.ni_indicator.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw NumericalError("frequency sample: indicator lost Hermitian symmetry");
  }
  s.ni_indicator = ((s.ni_indicator + s.ni_indicator.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.ni_indicator);
  s.indicator_min_eig = es.eigenvalues().minCoeff();
  s.indicator_max_eig = es.eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs((s.G + s.G.adjoint()) / 2.0);
  s.hermitian_part_min_eig = hs.eigenvalues().minCoeff();
  return s;
}

SweepResult frequency_sweep_lti(const LTIGame& sys, const FrequencyGrid& grid,
                                FrequencyCheckKind kind) {
  sys.validate();
  const std::vector<double> omegas = grid.omegas();

  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A);
  const Eigen::VectorXcd poles = es.eigenvalues();
  bool origin_pole = false;
  std::vector<double> axis_pole_freqs;
  for (int i = 0; i < poles.size(); ++i) {
    const double re = poles(i).real();
    if (kind == FrequencyCheckKind::SNI) {
      if (re >= -kPoleAxisTol) {
        throw CertificationError("SNI check: pole with real part " + fmt(re) +
                                 " is not strictly stable");
      }
      continue;
    }
    if (re > kPoleAxisTol) {
      throw CertificationError(std::string(to_string(kind)) +
                               " check: pole in the open right half plane (re = " + fmt(re) + ")");
    }
    if (std::abs(re) <= kPoleAxisTol) {
      if (std::abs(poles(i)) <= kPoleAxisTol) {
        origin_pole = true;
        axis_pole_freqs.push_back(0.0);
      } else {
        throw CertificationError(std::string(to_string(kind)) +
                                 " check: imaginary-axis pole at w = " + fmt(poles(i).imag()) +
                                 " is not supported (only origin poles with a real response are)");
      }
    }
  }
  for (double w : omegas) {
    for (double wp : axis_pole_freqs) {
      if (std::abs(w - wp) < kGridPoleClearance) {
        throw ValidationError("frequency sweep: grid point omega = " + fmt(w) +
                              " is within 1e-6 of an imaginary-axis pole");
      }
    }
  }

  SweepResult out;
  out.kind = kind;
  bool have_worst = false;
  double worst_metric = 0.0;
  for (double w : omegas) {
    FrequencySample s = frequency_sample(sys, w);
    if (origin_pole && s.G.imag().cwiseAbs().maxCoeff() > kPoleAxisTol) {
      throw CertificationError(std::string(to_string(kind)) +
                               " check: origin pole with a non-real response at omega = " +
                               fmt(w) + " is not supported");
    }
    const double metric = (kind == FrequencyCheckKind::Passive) ? s.hermitian_part_min_eig
                                                                : s.indicator_min_eig;
    if (!have_worst || metric < worst_metric) {
      have_worst = true;
      worst_metric = metric;
      out.worst = std::move(s);
    }
  }

  switch (kind) {
    case FrequencyCheckKind::NI:
      out.pass = worst_metric >= -1e-9;
      break;
    case FrequencyCheckKind::SNI:
      out.pass = worst_metric > 1e-12;
      break;
    case FrequencyCheckKind::Passive:
      out.pass = worst_metric >= -1e-9;
      break;
  }
  out.note = "grid-certified over [" + fmt(grid.omega_min) + ", " + fmt(grid.omega_max) +
             "], " + std::to_string(grid.points) + " points";
  return out;
}

NILemmaResult verify_ni_lemma(const LTIGame& sys, const NICertificate& cert) {
  sys.validate();
  const int nz = sys.state_dim();
  const int m = sys.input_dim();
  if (cert.P.rows() != nz || cert.P.cols() != nz) {
    throw ValidationError("ni lemma: P must be " + std::to_string(nz) + "x" +
                          std::to_string(nz));
  }
  if ((cert.P - cert.P.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("ni lemma: P must be symmetric");
  }

  if ((sys.D - sys.D.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw CertificationError("ni lemma: state-space test requires symmetric D");
  }

  NILemmaResult out;
  Eigen::MatrixXd lmi(nz + m, nz + m);
  lmi.topLeftCorner(nz, nz) = cert.P * sys.A + sys.A.transpose() * cert.P;
  lmi.topRightCorner(nz, m) = cert.P * sys.B - sys.A.transpose() * sys.C.transpose();
  lmi.bottomLeftCorner(m, nz) = sys.B.transpose() * cert.P - sys.C * sys.A;
  lmi.bottomRightCorner(m, m) =
      -(sys.C * sys.B + sys.B.transpose() * sys.C.transpose());
  lmi = ((lmi + lmi.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lmi_eigs(lmi);
  out.lmi_max_eig = lmi_eigs.eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eigs(
      (cert.P + cert.P.transpose()) / 2.0);
  out.p_min_eig = p_eigs.eigenvalues().minCoeff();

  out.pass = out.p_min_eig >= -1e-10 && out.lmi_max_eig <= 1e-10;

  if (cert.L || cert.W) {
    if (!cert.L || !cert.W) {
      throw ValidationError("ni lemma: L and W must be supplied together");
    }
    if (cert.L->cols() != nz || cert.W->cols() != m || cert.L->rows() != cert.W->rows()) {
      throw ValidationError("ni lemma: factor blocks must be r x " + std::to_string(nz) +
                            " and r x " + std::to_string(m));
    }
    Eigen::MatrixXd lw(cert.L->rows(), nz + m);
    lw << *cert.L, *cert.W;
    out.factor_gap = (lmi + lw.transpose() * lw).cwiseAbs().maxCoeff();
    out.pass = out.pass && *out.factor_gap <= 1e-8;
  }
  return out;
}

LinearizedRD linearize_rd(const SimplexState& x_star) {
  if (!x_star.interior()) {
    throw ValidationError("linearize: rest point must be interior");
  }
  const int n = x_star.size();
  LinearizedRD lin;
  lin.A_lin = -x_star.vec() * Eigen::RowVectorXd::Ones(n);
  lin.B_lin = Eigen::MatrixXd::Identity(n, n) - x_star.vec() * x_star.vec().transpose();
  lin.basis = tangent_basis(n);
  lin.A_r = lin.basis.N.transpose() * lin.A_lin * lin.basis.N;
  lin.B_r = lin.basis.N.transpose() * lin.B_lin * lin.basis.N;
  return lin;
}

LTIGame reduced_rd_plant(const LinearizedRD& lin) {
  const int r = static_cast<int>(lin.A_r.rows());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  A.topLeftCorner(r, r) = lin.A_r;
  A.topRightCorner(r, r) = lin.B_r;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * r, r);
  B.bottomRows(r) = Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(r, 2 * r);
  C.leftCols(r) = Eigen::MatrixXd::Identity(r, r);
  return make_lti(A, B, C, Eigen::MatrixXd::Zero(r, r));
}

LTIGame tangent_reduced_game(const LTIGame& g, const TangentBasis& basis) {
  g.validate();
  if (g.input_dim() != basis.n()) {
    throw ValidationError("tangent reduction: game has " + std::to_string(g.input_dim()) +
                          " channels, basis has " + std::to_string(basis.n()));
  }
  LTIGame r = make_lti(g.A, g.B * basis.N, basis.N.transpose() * g.C,
                       basis.N.transpose() * g.D * basis.N);
  r.z = g.z;
  return r;
}

ClosedLoopResult closed_loop_matrix(const LTIGame& plant, const LTIGame& controller) {
  plant.validate();
  controller.validate();
  if (plant.input_dim() != controller.input_dim()) {
    throw ValidationError("closed loop: plant has " + std::to_string(plant.input_dim()) +
                          " channels, controller has " +
                          std::to_string(controller.input_dim()));
  }
  const int m = plant.input_dim();
  const Eigen::MatrixXd loop_gain = Eigen::MatrixXd::Identity(m, m) - plant.D * controller.D;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(loop_gain);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin >= 1e12) {
    throw CertificationError("closed loop: I - D*Dbar is singular, interconnection ill posed");
  }
  const Eigen::MatrixXd S = loop_gain.inverse();

  const int np = plant.state_dim();
  const int nc = controller.state_dim();
  ClosedLoopResult out;
  out.a_closed.resize(np + nc, np + nc);
  out.a_closed.topLeftCorner(np, np) = plant.A + plant.B * controller.D * S * plant.C;
  out.a_closed.topRightCorner(np, nc) =
      plant.B * controller.C + plant.B * controller.D * S * plant.D * controller.C;
  out.a_closed.bottomLeftCorner(nc, np) = controller.B * S * plant.C;
  out.a_closed.bottomRightCorner(nc, nc) =
      controller.A + controller.B * S * plant.D * controller.C;

  Eigen::EigenSolver<Eigen::MatrixXd> es(out.a_closed);
  out.eigenvalues = es.eigenvalues();
  out.max_real_part = out.eigenvalues.real().maxCoeff();
  out.hurwitz = out.max_real_part < -1e-9;
  return out;
}

DcGainResult dc_gain_condition(const LTIGame& plant, const LTIGame& controller) {
  plant.validate();
  controller.validate();
  if (plant.input_dim() != controller.input_dim()) {
    throw ValidationError("dc gain: plant and controller channel counts differ");
  }
  auto dc = [](const LTIGame& g, const char* name) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(g.A);
    if (es.eigenvalues().cwiseAbs().minCoeff() <= kPoleAxisTol) {
      throw CertificationError(std::string("dc gain: ") + name +
                               " has a pole at the origin, condition not applicable");
    }
    return (g.D - g.C * g.A.partialPivLu().solve(g.B)).eval();
  };
  const Eigen::MatrixXd g0 = dc(plant, "plant");
  const Eigen::MatrixXd gbar0 = dc(controller, "controller");
  Eigen::EigenSolver<Eigen::MatrixXd> es(g0 * gbar0);
  DcGainResult out;
  out.lambda_max = es.eigenvalues().real().maxCoeff();
  out.pass = out.lambda_max < 1.0 - 1e-12;
  return out;
}

}  // namespace evodyn
