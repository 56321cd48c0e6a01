#ifndef EVODYN_SCENARIO_HPP
#define EVODYN_SCENARIO_HPP

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evodyn/certification.hpp"
#include "evodyn/interconnection.hpp"

namespace evodyn {

// Projection of a 3-strategy state onto the plane:
//   u = x_2 + x_3/2,  v = (sqrt(3)/2) x_3
// Vertices map to (0,0), (1,0), (1/2, sqrt(3)/2).
std::pair<double, double> simplex_project(const SimplexState& x);

// Strict JSON -> Eigen conversion; `where` names the offending field in errors.
Eigen::VectorXd json_to_vector(const nlohmann::json& v, const std::string& where);
Eigen::MatrixXd json_to_matrix(const nlohmann::json& v, const std::string& where);

struct GameSpec {
  enum class Type { Rps, Matrix, Lti };
  Type type = Type::Rps;
  double w = 1.0, l = 1.0;          // rps
  Eigen::MatrixXd A, B, C, D;       // matrix games use A only
  Eigen::VectorXd z0;               // lti initial state
  std::optional<Eigen::VectorXd> x_ref;  // lti loop reference

  int strategies() const;
  GameModel build() const;
};

struct LedgerCert {
  SupplyKind kind = SupplyKind::Payoff;
  std::optional<Eigen::VectorXd> x_star;  // default: barycenter
};
struct ClassifyCert {
  double tol = 1e-10;
};
struct FreqCert {
  FrequencyCheckKind kind = FrequencyCheckKind::NI;
  FrequencyGrid grid;
};
struct LmiCert {
  NICertificate cert;
};
struct LinearizeCert {
  std::optional<Eigen::VectorXd> x_star;  // default: barycenter
};
struct StabilityCert {};
struct DcGainCert {};

using Certification = std::variant<LedgerCert, ClassifyCert, FreqCert, LmiCert,
                                   LinearizeCert, StabilityCert, DcGainCert>;

struct ScenarioConfig {
  std::string name = "scenario";
  GameSpec game;
  DynamicsModel dynamics;
  Eigen::VectorXd x0;
  std::optional<Eigen::VectorXd> aux0;
  IntegratorConfig integrator;  // defaults: T = 50, h = 1e-3, stride 10
  std::vector<Certification> certifications;
};

// Parses and cross-validates a config. Dimension mismatches name both fields;
// unknown dynamics/game/certification tags list the valid ones.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig parse_scenario_file(const std::string& path);

// Fully resolved config (defaults filled); parsing it again reproduces the
// same config.
nlohmann::ordered_json canonical_config(const ScenarioConfig& cfg);

struct CertOutcome {
  std::string type;
  std::string status;   // "ok" or "not_applicable"
  std::string verdict;  // one-line result when status == ok
  std::string reason;   // why it did not apply
  nlohmann::ordered_json details() const;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> detail_fields;
};

struct RunSummary {
  std::string name;
  double final_time = 0.0;
  Eigen::VectorXd final_x;
  Eigen::VectorXd final_state;
  double rest_residual = 0.0;
  std::optional<double> ledger_max_residual;  // max over requested ledgers
  std::vector<CertOutcome> certifications;
  double wall_time_s = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Simulates the scenario and writes trajectory.csv, simplex.csv (3 strategies),
// per-request ledger CSVs, config.json and summary.json into out_dir. CSV
// payload is byte-identical across runs; wall time lives only in the summary.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                        bool write_svg = false);

}  // namespace evodyn

#endif
