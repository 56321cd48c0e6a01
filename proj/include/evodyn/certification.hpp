#ifndef EVODYN_CERTIFICATION_HPP
#define EVODYN_CERTIFICATION_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "evodyn/games.hpp"
#include "evodyn/simplex.hpp"
#include "evodyn/trajectory.hpp"

namespace evodyn {

// Relative entropy of x_star with respect to x:
//   V = -sum_i x*_i ln(x_i / x*_i)
// Nonnegative, zero only at x = x_star. x_star must be interior (parameter
// error); x with a zero entry is outside the domain.
double storage_standard(const SimplexState& x, const SimplexState& x_star);

// Same shape scaled by n_group/(n_group - 2); matches the group-size-corrected
// payoff dynamics. n_group >= 3.
double storage_local(const SimplexState& x, const SimplexState& x_star, int n_group);

enum class SupplyKind { Payoff, EffectivePayoff, IntegratedPayoff };

const char* to_string(SupplyKind k);

// Storage/supply bookkeeping along a trajectory. residual(t) = V(t) - V(0) -
// integral of the supply rate (trapezoid on the recorded grid); it stays at
// integrator-error scale whenever the supply matches the dynamics' true
// dissipation identity.
struct DissipationLedger {
  std::vector<double> times;
  std::vector<double> storage;
  std::vector<double> supply;
  std::vector<double> cumulative_supply;
  std::vector<double> residual;
  bool truncated = false;  // trajectory left the ledger's interior domain
  double t_guard = 0.0;    // last covered time

  double max_abs_residual() const;
  double max_storage_drift() const;  // max_t |V(t) - V(0)|
};

// Supply kinds: Payoff uses e.p, EffectivePayoff uses e.(p - gain.*x) (needs
// the passivated dynamics), IntegratedPayoff uses e.phat (needs the
// second-order dynamics). The ledger stops at the last sample with
// min_i x_i >= 1e-9 rather than report infinite storage.
DissipationLedger passivity_ledger(const Trajectory& traj, const SimplexState& x_star,
                                   SupplyKind kind);

enum class GameClass { StrictlyPassive, Lossless, NonPassive, Indefinite };

const char* to_string(GameClass c);

struct GameClassification {
  GameClass verdict;
  Eigen::VectorXd eigenvalues;  // of the tangent-restricted symmetric part, ascending
};

// Classify by the eigenvalues of M = N^T ((A + A^T)/2) N. Deviations e from an
// interior equilibrium are charged supply e.(A e), so a negative definite
// restriction dissipates (strictly passive), a skew game is lossless and a
// positive definite restriction pumps energy into the loop (non-passive).
GameClassification classify_matrix_game(const MatrixGame& g, double tol = 1e-10);

// G(jw) = (1 + alpha*jw) / (jw (1 + beta*jw)), evaluated directly and through
// the closed forms
//   Re = beta (alpha/beta - 1) / (beta^2 w^2 + 1)
//   Im = -(alpha beta w^2 + 1) / (beta^2 w^3 + w)
// The two evaluations are cross-checked on every call.
struct LeadLagResponse {
  std::complex<double> value;
  double re_closed_form, im_closed_form;
};

LeadLagResponse lead_lag_frequency_response(double alpha, double beta, double omega);

enum class LeadLagClass { PassiveAndNI, NIOnly };

const char* to_string(LeadLagClass c);

struct LeadLagClassification {
  LeadLagClass verdict;
  bool lossless_real_part = false;  // alpha == beta: real part identically zero
};

// alpha/beta > 1 gives a positive real part at every frequency (passive); the
// imaginary part is negative at every w > 0 regardless. Cross-validated by a
// frequency sweep before returning.
LeadLagClassification classify_lead_lag(double alpha, double beta);

struct FrequencyGrid {
  double omega_min = 1e-3;
  double omega_max = 1e3;
  int points = 2000;

  std::vector<double> omegas() const;  // log-spaced, deterministic
};

enum class FrequencyCheckKind { NI, SNI, Passive };

const char* to_string(FrequencyCheckKind k);

struct FrequencySample {
  double omega = 0.0;
  Eigen::MatrixXcd G;
  Eigen::MatrixXcd ni_indicator;  // j (G - G^H), Hermitian
  double indicator_min_eig = 0.0;
  double indicator_max_eig = 0.0;
  double hermitian_part_min_eig = 0.0;  // of (G + G^H)/2
};

FrequencySample frequency_sample(const LTIGame& sys, double omega);

struct SweepResult {
  bool pass = false;
  FrequencyCheckKind kind = FrequencyCheckKind::NI;
  FrequencySample worst;  // lowest omega wins ties
  std::string note;       // "grid-certified ..." provenance of the verdict
};

// Grid verdicts: NI needs min eig of the indicator >= -1e-9 everywhere, SNI
// needs it > 1e-12 everywhere (and all poles strictly stable), Passive needs
// the Hermitian part >= -1e-9. Poles on the imaginary axis are rejected except
// the documented origin-pole case with G(jw) real on the grid.
SweepResult frequency_sweep_lti(const LTIGame& sys, const FrequencyGrid& grid,
                                FrequencyCheckKind kind);

struct NICertificate {
  Eigen::MatrixXd P;
  std::optional<Eigen::MatrixXd> L, W;
};

struct NILemmaResult {
  bool pass = false;
  double lmi_max_eig = 0.0;  // of [[PA+A'P, PB-A'C'], [B'P-CA, -(CB+B'C')]]
  double p_min_eig = 0.0;
  std::optional<double> factor_gap;  // max |LMI + [L W]'[L W]| when L, W given
};

// State-space negative-imaginary test: P = P' >= 0 with the block matrix <= 0
// certifies the property without any frequency sweep. The test only applies to
// D = D' systems; an asymmetric D is a structural rejection, not a fail.
NILemmaResult verify_ni_lemma(const LTIGame& sys, const NICertificate& cert);

// Linearization of the payoff-integrating dynamics at an interior rest point
// (uniform integrated payoff): row i of A_lin is constant -x*_i and
// B_lin = I - x* x*'. A_r, B_r are the tangent-basis reductions; at the
// barycenter they collapse to A_r = 0, B_r = I (an (n-1)-channel double
// integrator once the integrator chain is attached).
struct LinearizedRD {
  Eigen::MatrixXd A_lin, B_lin;
  Eigen::MatrixXd A_r, B_r;
  TangentBasis basis;
};

LinearizedRD linearize_rd(const SimplexState& x_star);

// Reduced plant realization [[A_r, B_r],[0,0]] with the integrator chain as
// input channel: state (w, xi), input q, output w.
LTIGame reduced_rd_plant(const LinearizedRD& lin);

// Restrict a square dynamic game to tangent coordinates: (A, B N, N^T C, N^T D N).
LTIGame tangent_reduced_game(const LTIGame& g, const TangentBasis& basis);

struct ClosedLoopResult {
  Eigen::MatrixXd a_closed;
  Eigen::VectorXcd eigenvalues;
  double max_real_part = 0.0;
  bool hurwitz = false;  // all real parts < -1e-9
};

// Positive feedback interconnection matrix of plant (A,B,C,D) and controller
// (Abar,Bbar,Cbar,Dbar); I - D*Dbar must be well conditioned.
ClosedLoopResult closed_loop_matrix(const LTIGame& plant, const LTIGame& controller);

struct DcGainResult {
  bool pass = false;
  double lambda_max = 0.0;  // largest real part of eig(G(0) Gbar(0))
};

// DC-gain smallness test for the positive feedback loop; requires both systems
// to have no pole at the origin.
DcGainResult dc_gain_condition(const LTIGame& plant, const LTIGame& controller);

}  // namespace evodyn

#endif
