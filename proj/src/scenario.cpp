#include "evodyn/scenario.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace evodyn {

using nlohmann::json;
using nlohmann::ordered_json;

std::pair<double, double> simplex_project(const SimplexState& x) {
  if (x.size() != 3) {
    throw ValidationError("simplex projection is defined for 3 strategies, got " +
                          std::to_string(x.size()));
  }
  return {x[1] + 0.5 * x[2], std::sqrt(3.0) / 2.0 * x[2]};
}

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

const json& need(const json& j, const char* field, const char* where) {
  auto it = j.find(field);
  if (it == j.end()) fail(std::string(where) + ": missing field '" + field + "'");
  return *it;
}

double need_number(const json& j, const char* field, const char* where) {
  const json& v = need(j, field, where);
  if (!v.is_number()) fail(std::string(where) + ": '" + field + "' must be a number");
  return v.get<double>();
}

}  // namespace

Eigen::VectorXd json_to_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a non-empty array of numbers");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(where + " must contain only numbers");
    out(static_cast<int>(i)) = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd json_to_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a non-empty array of rows");
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) fail(where + " rows must be non-empty arrays");
  Eigen::MatrixXd out(v.size(), cols);
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      fail(where + " rows must all have length " + std::to_string(cols));
    }
    for (size_t k = 0; k < cols; ++k) {
      if (!v[i][k].is_number()) fail(where + " must contain only numbers");
      out(static_cast<int>(i), static_cast<int>(k)) = v[i][k].get<double>();
    }
  }
  return out;
}

namespace {

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

GameSpec parse_game(const json& g) {
  if (!g.is_object()) fail("game must be an object");
  const std::string type = need(g, "type", "game").get<std::string>();
  GameSpec spec;
  if (type == "rps") {
    spec.type = GameSpec::Type::Rps;
    spec.w = need_number(g, "w", "game");
    spec.l = need_number(g, "l", "game");
  } else if (type == "matrix") {
    spec.type = GameSpec::Type::Matrix;
    spec.A = json_to_matrix(need(g, "A", "game"), "game.A");
  } else if (type == "lti") {
    spec.type = GameSpec::Type::Lti;
    spec.A = json_to_matrix(need(g, "A", "game"), "game.A");
    spec.B = json_to_matrix(need(g, "B", "game"), "game.B");
    spec.C = json_to_matrix(need(g, "C", "game"), "game.C");
    spec.D = json_to_matrix(need(g, "D", "game"), "game.D");
    spec.z0 = g.contains("z0") ? json_to_vector(g["z0"], "game.z0")
                               : Eigen::VectorXd::Zero(spec.A.rows()).eval();
    if (g.contains("x_ref")) spec.x_ref = json_to_vector(g["x_ref"], "game.x_ref");
  } else {
    fail("unknown game type '" + type + "'; valid: rps, matrix, lti");
  }
  (void)spec.build();  // shape/positivity validation with the game's own messages
  return spec;
}

DynamicsModel parse_dynamics(const json& d, int n) {
  if (!d.is_object()) fail("dynamics must be an object");
  const std::string type = need(d, "type", "dynamics").get<std::string>();
  DynamicsModel model;
  if (type == "standard") {
    model.kind = StandardRD{};
  } else if (type == "local_graph") {
    model.kind = LocalGraphRD{json_to_matrix(need(d, "adjacency", "dynamics"), "dynamics.adjacency")};
  } else if (type == "local_modified") {
    const json& ng = need(d, "n_group", "dynamics");
    if (!ng.is_number_integer()) fail("dynamics.n_group must be an integer");
    model.kind = LocalModifiedRD{ng.get<int>()};
  } else if (type == "second_order") {
    model.kind = SecondOrderRD{};
  } else if (type == "lead_lag") {
    model.kind = LeadLagRD{need_number(d, "alpha", "dynamics"), need_number(d, "beta", "dynamics")};
  } else if (type == "passivated") {
    const json& g = need(d, "gain", "dynamics");
    Eigen::VectorXd gain;
    if (g.is_number()) {
      gain = Eigen::VectorXd::Constant(n, g.get<double>());
    } else {
      gain = json_to_vector(g, "dynamics.gain");
    }
    model.kind = PassivatedRD{std::move(gain)};
  } else {
    fail("unknown dynamics type '" + type +
         "'; valid: standard, local_graph, local_modified, second_order, lead_lag, passivated");
  }
  model.validate(n);
  return model;
}

SupplyKind parse_supply_kind(const std::string& s) {
  if (s == "payoff") return SupplyKind::Payoff;
  if (s == "effective_payoff") return SupplyKind::EffectivePayoff;
  if (s == "integrated_payoff") return SupplyKind::IntegratedPayoff;
  fail("unknown ledger kind '" + s + "'; valid: payoff, effective_payoff, integrated_payoff");
}

FrequencyCheckKind parse_freq_kind(const std::string& s) {
  if (s == "ni") return FrequencyCheckKind::NI;
  if (s == "sni") return FrequencyCheckKind::SNI;
  if (s == "passive") return FrequencyCheckKind::Passive;
  fail("unknown frequency check kind '" + s + "'; valid: ni, sni, passive");
}

Certification parse_certification(const json& c, const ScenarioConfig& cfg) {
  if (!c.is_object()) fail("certifications entries must be objects");
  const std::string type = need(c, "type", "certification").get<std::string>();
  const int n = static_cast<int>(cfg.x0.size());
  const bool lti = cfg.game.type == GameSpec::Type::Lti;

  if (type == "ledger") {
    LedgerCert lc;
    lc.kind = parse_supply_kind(need(c, "kind", "ledger certification").get<std::string>());
    if (c.contains("x_star")) {
      lc.x_star = json_to_vector(c["x_star"], "certification.x_star");
      if (lc.x_star->size() != n) {
        fail("certification.x_star has " + std::to_string(lc.x_star->size()) +
             " entries but x0 has " + std::to_string(n));
      }
    }
    if (lc.kind == SupplyKind::EffectivePayoff &&
        !std::holds_alternative<PassivatedRD>(cfg.dynamics.kind)) {
      fail("ledger kind 'effective_payoff' needs dynamics 'passivated', got '" +
           cfg.dynamics.tag() + "'");
    }
    if (lc.kind == SupplyKind::IntegratedPayoff &&
        !std::holds_alternative<SecondOrderRD>(cfg.dynamics.kind)) {
      fail("ledger kind 'integrated_payoff' needs dynamics 'second_order', got '" +
           cfg.dynamics.tag() + "'");
    }
    return lc;
  }
  if (type == "classify") {
    if (lti) fail("certification 'classify' needs a payoff matrix game, game.type is 'lti'");
    ClassifyCert cc;
    if (c.contains("tol")) cc.tol = c["tol"].get<double>();
    return cc;
  }
  if (type == "freq") {
    if (!lti) fail("certification 'freq' needs game.type 'lti'");
    FreqCert fc;
    fc.kind = parse_freq_kind(need(c, "kind", "freq certification").get<std::string>());
    if (c.contains("omega_min")) fc.grid.omega_min = c["omega_min"].get<double>();
    if (c.contains("omega_max")) fc.grid.omega_max = c["omega_max"].get<double>();
    if (c.contains("points")) fc.grid.points = c["points"].get<int>();
    return fc;
  }
  if (type == "lmi") {
    if (!lti) fail("certification 'lmi' needs game.type 'lti'");
    if (c.contains("L") != c.contains("W")) {
      fail("lmi certification: L and W form one factorization, give both or neither");
    }
    // gcc -O3 false positive: moving a disengaged optional matrix "reads" its
    // never-written dimensions
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
    LmiCert lc;
    lc.cert.P = json_to_matrix(need(c, "P", "lmi certification"), "certification.P");
    if (c.contains("L")) lc.cert.L = json_to_matrix(c["L"], "certification.L");
    if (c.contains("W")) lc.cert.W = json_to_matrix(c["W"], "certification.W");
    return lc;
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif
  }
  if (type == "linearize") {
    LinearizeCert lc;
    if (c.contains("x_star")) {
      lc.x_star = json_to_vector(c["x_star"], "certification.x_star");
      if (lc.x_star->size() != n) {
        fail("certification.x_star has " + std::to_string(lc.x_star->size()) +
             " entries but x0 has " + std::to_string(n));
      }
    }
    return lc;
  }
  if (type == "stability") {
    if (!lti) fail("certification 'stability' needs game.type 'lti'");
    if (!std::holds_alternative<SecondOrderRD>(cfg.dynamics.kind)) {
      fail("certification 'stability' needs dynamics 'second_order', got '" +
           cfg.dynamics.tag() + "'");
    }
    return StabilityCert{};
  }
  if (type == "dc_gain") {
    if (!lti) fail("certification 'dc_gain' needs game.type 'lti'");
    return DcGainCert{};
  }
  fail("unknown certification type '" + type +
       "'; valid: ledger, classify, freq, lmi, linearize, stability, dc_gain");
}

}  // namespace

int GameSpec::strategies() const {
  switch (type) {
    case Type::Rps: return 3;
    case Type::Matrix: return static_cast<int>(A.rows());
    default: return static_cast<int>(D.cols());
  }
}

GameModel GameSpec::build() const {
  switch (type) {
    case Type::Rps:
      return make_rps_game(w, l);
    case Type::Matrix: {
      MatrixGame g{A};
      g.validate();
      return g;
    }
    default: {
      LTIGame g{A, B, C, D, z0};
      g.validate();
      return g;
    }
  }
}

ScenarioConfig parse_scenario(const json& j) {
  if (!j.is_object()) fail("scenario config must be a JSON object");
  ScenarioConfig cfg;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name must be a string");
    cfg.name = j["name"].get<std::string>();
  }
  cfg.game = parse_game(need(j, "game", "scenario"));
  cfg.x0 = json_to_vector(need(j, "x0", "scenario"), "x0");

  const int n = static_cast<int>(cfg.x0.size());
  if (cfg.game.strategies() != n) {
    fail("x0 has " + std::to_string(n) + " entries but the game expects " +
         std::to_string(cfg.game.strategies()) +
         (cfg.game.type == GameSpec::Type::Rps ? " (game.type 'rps')" : " (from the game matrices)"));
  }
  (void)SimplexState(cfg.x0);  // entry/sum validation with its own messages

  cfg.dynamics = parse_dynamics(need(j, "dynamics", "scenario"), n);

  if (j.contains("aux0")) {
    cfg.aux0 = json_to_vector(j["aux0"], "aux0");
    const int want = cfg.dynamics.aux_dim(n);
    if (want == 0) {
      fail("aux0 given but dynamics '" + cfg.dynamics.tag() + "' carries no payoff memory");
    }
    if (cfg.aux0->size() != want) {
      fail("aux0 has " + std::to_string(cfg.aux0->size()) + " entries but dynamics '" +
           cfg.dynamics.tag() + "' needs " + std::to_string(want));
    }
  }
  if (cfg.game.x_ref && cfg.game.x_ref->size() != n) {
    fail("game.x_ref has " + std::to_string(cfg.game.x_ref->size()) +
         " entries but x0 has " + std::to_string(n));
  }

  if (j.contains("integrator")) {
    const json& it = j["integrator"];
    if (!it.is_object()) fail("integrator must be an object");
    if (it.contains("h")) cfg.integrator.h = it["h"].get<double>();
    if (it.contains("T")) cfg.integrator.T = it["T"].get<double>();
    if (it.contains("record_stride")) cfg.integrator.record_stride = it["record_stride"].get<int>();
    if (!(cfg.integrator.h > 0.0)) fail("integrator.h must be positive");
    if (!(cfg.integrator.T > 0.0)) fail("integrator.T must be positive");
    if (cfg.integrator.record_stride < 1) fail("integrator.record_stride must be >= 1");
  }

  if (j.contains("certifications")) {
    if (!j["certifications"].is_array()) fail("certifications must be an array");
    for (const auto& c : j["certifications"]) {
      cfg.certifications.push_back(parse_certification(c, cfg));
    }
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

ordered_json canonical_config(const ScenarioConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;

  ordered_json g;
  switch (cfg.game.type) {
    case GameSpec::Type::Rps:
      g["type"] = "rps";
      g["w"] = cfg.game.w;
      g["l"] = cfg.game.l;
      break;
    case GameSpec::Type::Matrix:
      g["type"] = "matrix";
      g["A"] = mat_json(cfg.game.A);
      break;
    case GameSpec::Type::Lti:
      g["type"] = "lti";
      g["A"] = mat_json(cfg.game.A);
      g["B"] = mat_json(cfg.game.B);
      g["C"] = mat_json(cfg.game.C);
      g["D"] = mat_json(cfg.game.D);
      g["z0"] = vec_json(cfg.game.z0);
      if (cfg.game.x_ref) g["x_ref"] = vec_json(*cfg.game.x_ref);
      break;
  }
  j["game"] = g;

  ordered_json d;
  d["type"] = cfg.dynamics.tag();
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LocalGraphRD>) {
          d["adjacency"] = mat_json(k.adjacency);
        } else if constexpr (std::is_same_v<T, LocalModifiedRD>) {
          d["n_group"] = k.n_group;
        } else if constexpr (std::is_same_v<T, LeadLagRD>) {
          d["alpha"] = k.alpha;
          d["beta"] = k.beta;
        } else if constexpr (std::is_same_v<T, PassivatedRD>) {
          d["gain"] = vec_json(k.gain);
        }
      },
      cfg.dynamics.kind);
  j["dynamics"] = d;

  j["x0"] = vec_json(cfg.x0);
  if (cfg.aux0) j["aux0"] = vec_json(*cfg.aux0);

  ordered_json it;
  it["h"] = cfg.integrator.h;
  it["T"] = cfg.integrator.T;
  it["record_stride"] = cfg.integrator.record_stride;
  j["integrator"] = it;

  ordered_json certs = ordered_json::array();
  for (const auto& cert : cfg.certifications) {
    ordered_json c;
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, LedgerCert>) {
            c["type"] = "ledger";
            c["kind"] = to_string(k.kind);
            if (k.x_star) c["x_star"] = vec_json(*k.x_star);
          } else if constexpr (std::is_same_v<T, ClassifyCert>) {
            c["type"] = "classify";
            c["tol"] = k.tol;
          } else if constexpr (std::is_same_v<T, FreqCert>) {
            c["type"] = "freq";
            c["kind"] = k.kind == FrequencyCheckKind::NI      ? "ni"
                        : k.kind == FrequencyCheckKind::SNI   ? "sni"
                                                              : "passive";
            c["omega_min"] = k.grid.omega_min;
            c["omega_max"] = k.grid.omega_max;
            c["points"] = k.grid.points;
          } else if constexpr (std::is_same_v<T, LmiCert>) {
            c["type"] = "lmi";
            c["P"] = mat_json(k.cert.P);
            if (k.cert.L) c["L"] = mat_json(*k.cert.L);
            if (k.cert.W) c["W"] = mat_json(*k.cert.W);
          } else if constexpr (std::is_same_v<T, LinearizeCert>) {
            c["type"] = "linearize";
            if (k.x_star) c["x_star"] = vec_json(*k.x_star);
          } else if constexpr (std::is_same_v<T, StabilityCert>) {
            c["type"] = "stability";
          } else {
            c["type"] = "dc_gain";
          }
        },
        cert);
    certs.push_back(c);
  }
  j["certifications"] = certs;
  return j;
}

ordered_json CertOutcome::details() const {
  ordered_json d;
  for (const auto& [k, v] : detail_fields) d[k] = v;
  return d;
}

ordered_json RunSummary::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["final_time"] = final_time;
  j["final_state"] = vec_json(final_x);
  j["final_state_full"] = vec_json(final_state);
  j["rest_point_residual"] = rest_residual;
  if (ledger_max_residual) {
    j["ledger_max_residual"] = *ledger_max_residual;
  } else {
    j["ledger_max_residual"] = nullptr;
  }
  ordered_json certs = ordered_json::array();
  for (const auto& c : certifications) {
    ordered_json e;
    e["type"] = c.type;
    e["status"] = c.status;
    if (c.status == "ok") {
      e["verdict"] = c.verdict;
      e["details"] = c.details();
    } else {
      e["reason"] = c.reason;
    }
    certs.push_back(e);
  }
  j["certifications"] = certs;
  j["wall_time_s"] = wall_time_s;
  return j;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write '" + path.string() + "'");
  out << body;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  const int n = traj.layout.n;
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  for (int i = 1; i <= n; ++i) os << ",p_" << i;
  for (int i = 1; i <= traj.layout.aux; ++i) os << ",phat_" << i;
  for (int i = 1; i <= traj.layout.nz; ++i) os << ",z_" << i;
  os << "\n";
  for (size_t k = 0; k < traj.samples(); ++k) {
    os << num17(traj.times[k]);
    const Eigen::VectorXd& s = traj.states[k];
    for (int i = 0; i < n; ++i) os << "," << num17(s(i));
    for (int i = 0; i < n; ++i) os << "," << num17(traj.payoffs[k](i));
    for (int i = 0; i < traj.layout.aux + traj.layout.nz; ++i) os << "," << num17(s(n + i));
    os << "\n";
  }
  return os.str();
}

std::string ledger_csv(const DissipationLedger& led) {
  std::ostringstream os;
  os << "t,V,supply,cumulative_supply,residual\n";
  for (size_t k = 0; k < led.times.size(); ++k) {
    os << num17(led.times[k]) << "," << num17(led.storage[k]) << "," << num17(led.supply[k])
       << "," << num17(led.cumulative_supply[k]) << "," << num17(led.residual[k]) << "\n";
  }
  return os.str();
}

std::string simplex_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,u,v\n";
  for (size_t k = 0; k < traj.samples(); ++k) {
    const auto [u, v] = simplex_project(SimplexState(traj.x_at(k)));
    os << num17(traj.times[k]) << "," << num17(u) << "," << num17(v) << "\n";
  }
  return os.str();
}

std::string simplex_svg(const Trajectory& traj) {
  // unit triangle scaled into a 640x600 box, y up
  const double sx = 560.0, margin = 40.0, height = 560.0;
  auto px = [&](double u) { return margin + sx * u; };
  auto py = [&](double v) { return margin + height - sx * v; };
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='640' "
        "viewBox='0 0 640 640'>\n";
  os << "<polygon points='" << px(0) << "," << py(0) << " " << px(1) << "," << py(0) << " "
     << px(0.5) << "," << py(std::sqrt(3.0) / 2.0)
     << "' fill='none' stroke='#888' stroke-width='1'/>\n";
  os << "<polyline fill='none' stroke='#1f77b4' stroke-width='1' points='";
  for (size_t k = 0; k < traj.samples(); ++k) {
    const auto [u, v] = simplex_project(SimplexState(traj.x_at(k)));
    os << px(u) << "," << py(v) << " ";
  }
  os << "'/>\n</svg>\n";
  return os.str();
}

CertOutcome not_applicable(const std::string& type, const std::string& reason) {
  CertOutcome out;
  out.type = type;
  out.status = "not_applicable";
  out.reason = reason;
  return out;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                        bool write_svg) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();

  const GameModel game = cfg.game.build();
  const SimplexState x0{cfg.x0};
  const ClosedLoopSystem sys =
      assemble(cfg.dynamics, game, x0, cfg.aux0,
               cfg.game.type == GameSpec::Type::Lti ? cfg.game.x_ref : std::nullopt);
  const Trajectory traj = integrate(sys, cfg.integrator);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_text(dir / "trajectory.csv", trajectory_csv(traj));
  if (traj.layout.n == 3) write_text(dir / "simplex.csv", simplex_csv(traj));
  if (write_svg && traj.layout.n == 3) write_text(dir / "simplex.svg", simplex_svg(traj));

  RunSummary summary;
  summary.name = cfg.name;
  summary.final_time = traj.times.back();
  summary.final_x = traj.x_at(traj.samples() - 1);
  summary.final_state = traj.states.back();
  summary.rest_residual = rest_point_residual(sys, traj.states.back());

  const int n = traj.layout.n;
  const SimplexState center = barycenter(n);
  int ledger_count = 0;

  for (const auto& cert : cfg.certifications) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          CertOutcome out;
          try {
            if constexpr (std::is_same_v<T, LedgerCert>) {
              out.type = "ledger";
              const SimplexState xs = k.x_star ? SimplexState(*k.x_star) : center;
              const DissipationLedger led = passivity_ledger(traj, xs, k.kind);
              ++ledger_count;
              const std::string fname =
                  ledger_count == 1 ? "ledger.csv"
                                    : "ledger_" + std::to_string(ledger_count) + ".csv";
              write_text(dir / fname, ledger_csv(led));
              out.status = "ok";
              out.verdict = "max residual " + num17(led.max_abs_residual()) +
                            (led.truncated ? " (guarded at t = " + num17(led.t_guard) + ")" : "");
              out.detail_fields = {
                  {"kind", to_string(k.kind)},
                  {"file", fname},
                  {"max_abs_residual", led.max_abs_residual()},
                  {"max_storage_drift", led.max_storage_drift()},
                  {"cumulative_supply_final", led.cumulative_supply.back()},
                  {"t_guard", led.t_guard},
                  {"truncated", led.truncated},
              };
              const double m = led.max_abs_residual();
              summary.ledger_max_residual =
                  summary.ledger_max_residual ? std::max(*summary.ledger_max_residual, m) : m;
            } else if constexpr (std::is_same_v<T, ClassifyCert>) {
              out.type = "classify";
              const auto& mg = std::get<MatrixGame>(game);
              const GameClassification c = classify_matrix_game(mg, k.tol);
              out.status = "ok";
              out.verdict = to_string(c.verdict);
              out.detail_fields = {{"eigenvalues", vec_json(c.eigenvalues)}, {"tol", k.tol}};
            } else if constexpr (std::is_same_v<T, FreqCert>) {
              out.type = "freq";
              const auto& lti = std::get<LTIGame>(game);
              const SweepResult r = frequency_sweep_lti(lti, k.grid, k.kind);
              out.status = "ok";
              out.verdict = std::string(to_string(k.kind)) + (r.pass ? ": pass" : ": fail") +
                            " (" + r.note + ")";
              out.detail_fields = {
                  {"pass", r.pass},
                  {"worst_omega", r.worst.omega},
                  {"worst_indicator_min_eig", r.worst.indicator_min_eig},
                  {"worst_hermitian_part_min_eig", r.worst.hermitian_part_min_eig},
              };
            } else if constexpr (std::is_same_v<T, LmiCert>) {
              out.type = "lmi";
              const auto& lti = std::get<LTIGame>(game);
              const NILemmaResult r = verify_ni_lemma(lti, k.cert);
              out.status = "ok";
              out.verdict = r.pass ? "pass" : "fail";
              out.detail_fields = {
                  {"lmi_max_eig", r.lmi_max_eig},
                  {"p_min_eig", r.p_min_eig},
              };
              if (r.factor_gap) out.detail_fields.push_back({"factor_gap", *r.factor_gap});
            } else if constexpr (std::is_same_v<T, LinearizeCert>) {
              out.type = "linearize";
              const SimplexState xs = k.x_star ? SimplexState(*k.x_star) : center;
              const LinearizedRD lin = linearize_rd(xs);
              out.status = "ok";
              out.verdict = "reduced to " + std::to_string(lin.A_r.rows()) + " tangent channels";
              out.detail_fields = {
                  {"A_r", mat_json(lin.A_r)},
                  {"B_r", mat_json(lin.B_r)},
              };
            } else if constexpr (std::is_same_v<T, StabilityCert>) {
              out.type = "stability";
              const auto& lti = std::get<LTIGame>(game);
              const LinearizedRD lin = linearize_rd(SimplexState(sys.x_ref));
              const LTIGame plant = reduced_rd_plant(lin);
              const LTIGame ctrl = tangent_reduced_game(lti, lin.basis);
              const ClosedLoopResult r = closed_loop_matrix(plant, ctrl);
              out.status = "ok";
              out.verdict = r.hurwitz ? "hurwitz" : "not hurwitz";
              ordered_json eigs = ordered_json::array();
              for (int i = 0; i < r.eigenvalues.size(); ++i) {
                eigs.push_back({{"re", r.eigenvalues(i).real()}, {"im", r.eigenvalues(i).imag()}});
              }
              out.detail_fields = {
                  {"max_real_part", r.max_real_part},
                  {"eigenvalues", eigs},
              };
            } else {
              out.type = "dc_gain";
              const auto& lti = std::get<LTIGame>(game);
              const LinearizedRD lin = linearize_rd(SimplexState(sys.x_ref));
              const DcGainResult r =
                  dc_gain_condition(reduced_rd_plant(lin), tangent_reduced_game(lti, lin.basis));
              out.status = "ok";
              out.verdict = r.pass ? "pass" : "fail";
              out.detail_fields = {{"lambda_max", r.lambda_max}};
            }
          } catch (const CertificationError& e) {
            out = not_applicable(out.type, e.what());
          } catch (const DomainError& e) {
            out = not_applicable(out.type, e.what());
          }
          summary.certifications.push_back(std::move(out));
        },
        cert);
  }

  write_text(dir / "config.json", canonical_config(cfg).dump(2) + "\n");
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(dir / "summary.json", summary.to_json().dump(2) + "\n");
  return summary;
}

}  // namespace evodyn
