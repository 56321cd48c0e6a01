#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "evodyn/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace evodyn;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

const json& need(const json& j, const char* field, const std::string& path) {
  auto it = j.find(field);
  if (it == j.end()) throw ValidationError("'" + path + "': missing field '" + field + "'");
  return *it;
}

LTIGame load_system(const std::string& path) {
  const json j = load_json_file(path);
  if (!j.is_object()) throw ValidationError("'" + path + "' must hold an object {A,B,C,D[,z0]}");
  LTIGame g = make_lti(json_to_matrix(need(j, "A", path), path + ": A"),
                       json_to_matrix(need(j, "B", path), path + ": B"),
                       json_to_matrix(need(j, "C", path), path + ": C"),
                       json_to_matrix(need(j, "D", path), path + ": D"));
  if (j.contains("z0")) g.z = json_to_vector(j["z0"], path + ": z0");
  g.validate();
  return g;
}

ordered_json mat_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

SimplexState state_or_barycenter(const std::vector<double>& raw, int n) {
  if (raw.empty()) return barycenter(n);
  return SimplexState(Eigen::Map<const Eigen::VectorXd>(raw.data(),
                                                        static_cast<long>(raw.size())));
}

void print_summary(const RunSummary& s, const std::string& out_dir) {
  std::cout << "scenario '" << s.name << "': t final " << s.final_time
            << ", rest point residual " << s.rest_residual << "\n";
  if (s.ledger_max_residual) {
    std::cout << "  ledger max residual " << *s.ledger_max_residual << "\n";
  }
  for (const auto& c : s.certifications) {
    if (c.status == "ok") {
      std::cout << "  " << c.type << ": " << c.verdict << "\n";
    } else {
      std::cout << "  " << c.type << ": not applicable (" << c.reason << ")\n";
    }
  }
  std::cout << "outputs in " << out_dir << "\n";
}

struct BatchResult {
  std::string stem;
  int code = 0;
  std::string line;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replicator dynamics with passivity and negative-imaginary certification"};
  app.require_subcommand(1);
  int exit_code = 0;

  std::string scenario_path, out_dir;
  bool svg = false;
  long long seed = 0;  // reserved: every code path is deterministic
  auto* sim = app.add_subcommand("simulate", "run one scenario and write its outputs");
  sim->add_option("scenario", scenario_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_flag("--svg", svg, "also write simplex.svg (3 strategies only)");
  sim->add_option("--seed", seed, "reserved, currently unused")->group("");
  sim->callback([&] {
    const RunSummary s = run_scenario(parse_scenario_file(scenario_path), out_dir, svg);
    print_summary(s, out_dir);
  });

  double w = 0.0, l = 0.0, tol = 1e-10;
  std::string matrix_path;
  auto* cls = app.add_subcommand("classify-game", "passivity class of a payoff matrix");
  auto* wopt = cls->add_option("--w", w, "cyclic win payoff");
  auto* lopt = cls->add_option("--l", l, "cyclic loss payoff");
  wopt->needs(lopt);
  lopt->needs(wopt);
  auto* mopt = cls->add_option("--matrix", matrix_path,
                               "JSON file holding the payoff rows (or {\"A\": rows})")
                   ->check(CLI::ExistingFile);
  mopt->excludes(wopt);
  cls->add_option("--tol", tol, "eigenvalue zero tolerance");
  cls->callback([&] {
    MatrixGame g;
    if (!matrix_path.empty()) {
      const json j = load_json_file(matrix_path);
      g.A = json_to_matrix(j.is_object() ? need(j, "A", matrix_path) : j, matrix_path);
      g.validate();
    } else if (wopt->count() > 0) {
      g = make_rps_game(w, l);
    } else {
      throw ValidationError("classify-game: give --w/--l or --matrix");
    }
    const GameClassification c = classify_matrix_game(g, tol);
    std::cout << to_string(c.verdict) << "\n";
    std::cout << "tangent symmetric part eigenvalues:";
    for (int i = 0; i < c.eigenvalues.size(); ++i) std::cout << " " << c.eigenvalues(i);
    std::cout << "\n";
  });

  double alpha = 0.0, beta = 0.0;
  std::string system_path, kind = "ni";
  FrequencyGrid grid;
  auto* fq = app.add_subcommand("freq-check", "frequency-domain NI / passivity verdicts");
  auto* aopt = fq->add_option("--alpha", alpha, "lead-lag numerator time constant");
  auto* bopt = fq->add_option("--beta", beta, "lead-lag denominator time constant");
  aopt->needs(bopt);
  bopt->needs(aopt);
  auto* sopt = fq->add_option("--system", system_path, "JSON state-space file {A,B,C,D[,z0]}")
                   ->check(CLI::ExistingFile);
  sopt->excludes(aopt);
  fq->add_option("--kind", kind, "test to run against --system")
      ->check(CLI::IsMember({"ni", "sni", "passive"}));
  fq->add_option("--omega-min", grid.omega_min, "sweep start (rad/s)");
  fq->add_option("--omega-max", grid.omega_max, "sweep end (rad/s)");
  fq->add_option("--points", grid.points, "log-spaced grid size");
  fq->callback([&] {
    if (aopt->count() > 0) {
      const LeadLagClassification c = classify_lead_lag(alpha, beta);
      std::cout << to_string(c.verdict) << "\n";
      if (c.lossless_real_part) std::cout << "real part identically zero (alpha = beta)\n";
      return;
    }
    if (system_path.empty()) {
      throw ValidationError("freq-check: give --alpha/--beta or --system");
    }
    const LTIGame sys = load_system(system_path);
    const FrequencyCheckKind k = kind == "ni"    ? FrequencyCheckKind::NI
                                 : kind == "sni" ? FrequencyCheckKind::SNI
                                                 : FrequencyCheckKind::Passive;
    const SweepResult r = frequency_sweep_lti(sys, grid, k);
    std::cout << to_string(k) << ": " << (r.pass ? "pass" : "fail") << " (" << r.note << ")\n";
    std::cout << "worst sample: omega " << r.worst.omega << ", indicator min eig "
              << r.worst.indicator_min_eig << ", hermitian part min eig "
              << r.worst.hermitian_part_min_eig << "\n";
  });

  std::string lmi_system_path, cert_path;
  auto* lm = app.add_subcommand("lmi-check", "state-space NI lemma certificate");
  lm->add_option("--system", lmi_system_path, "JSON state-space file {A,B,C,D}")
      ->required()
      ->check(CLI::ExistingFile);
  lm->add_option("--cert", cert_path, "JSON certificate {P[,L,W]}")
      ->required()
      ->check(CLI::ExistingFile);
  lm->callback([&] {
    const LTIGame sys = load_system(lmi_system_path);
    const json j = load_json_file(cert_path);
    if (!j.is_object()) throw ValidationError("'" + cert_path + "' must hold {P[,L,W]}");
    if (j.contains("L") != j.contains("W")) {
      throw ValidationError("certificate: L and W form one factorization, give both or neither");
    }
    NICertificate cert;
    cert.P = json_to_matrix(need(j, "P", cert_path), cert_path + ": P");
    if (j.contains("L")) cert.L = json_to_matrix(j["L"], cert_path + ": L");
    if (j.contains("W")) cert.W = json_to_matrix(j["W"], cert_path + ": W");
    const NILemmaResult r = verify_ni_lemma(sys, cert);
    std::cout << (r.pass ? "pass" : "fail") << "\n";
    std::cout << "lmi max eig " << r.lmi_max_eig << ", P min eig " << r.p_min_eig << "\n";
    if (r.factor_gap) std::cout << "factorization gap " << *r.factor_gap << "\n";
  });

  std::vector<double> x_star_raw;
  int n_bary = 0;
  auto* lz = app.add_subcommand("linearize", "tangent-reduced linearization at a rest point");
  auto* xopt = lz->add_option("--x-star", x_star_raw, "interior rest point (space separated)");
  auto* nopt = lz->add_option("--n", n_bary, "use the n-strategy barycenter")
                   ->check(CLI::Range(2, 1000));
  xopt->excludes(nopt);
  lz->callback([&] {
    if (x_star_raw.empty() && nopt->count() == 0) {
      throw ValidationError("linearize: give --x-star or --n");
    }
    const LinearizedRD lin = linearize_rd(state_or_barycenter(x_star_raw, n_bary));
    ordered_json out;
    out["A_lin"] = mat_to_json(lin.A_lin);
    out["B_lin"] = mat_to_json(lin.B_lin);
    out["A_r"] = mat_to_json(lin.A_r);
    out["B_r"] = mat_to_json(lin.B_r);
    std::cout << out.dump(2) << "\n";
  });

  std::string stab_system_path;
  std::vector<double> stab_x_star;
  auto* st = app.add_subcommand(
      "stability", "closed-loop eigenvalue test of the linearized interconnection");
  st->add_option("--system", stab_system_path, "dynamic game, JSON {A,B,C,D}")
      ->required()
      ->check(CLI::ExistingFile);
  st->add_option("--x-star", stab_x_star, "interior rest point (default barycenter)");
  st->callback([&] {
    const LTIGame game = load_system(stab_system_path);
    const LinearizedRD lin = linearize_rd(state_or_barycenter(stab_x_star, game.input_dim()));
    const LTIGame plant = reduced_rd_plant(lin);
    const LTIGame ctrl = tangent_reduced_game(game, lin.basis);
    const ClosedLoopResult r = closed_loop_matrix(plant, ctrl);
    std::cout << (r.hurwitz ? "hurwitz" : "not hurwitz") << " (max real part "
              << r.max_real_part << ")\n";
    std::cout << "eigenvalues:";
    for (int i = 0; i < r.eigenvalues.size(); ++i) {
      std::cout << " " << r.eigenvalues(i).real() << (r.eigenvalues(i).imag() < 0 ? "-" : "+")
                << std::abs(r.eigenvalues(i).imag()) << "j";
    }
    std::cout << "\n";
    try {
      const DcGainResult dc = dc_gain_condition(plant, ctrl);
      std::cout << "dc gain: " << (dc.pass ? "pass" : "fail") << " (lambda max "
                << dc.lambda_max << ")\n";
    } catch (const CertificationError& e) {
      std::cout << "dc gain: not applicable (" << e.what() << ")\n";
    }
  });

  std::string batch_dir, batch_out = "batch-out";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool batch_svg = false;
  auto* bt = app.add_subcommand("batch", "run every *.json scenario in a directory");
  bt->add_option("dir", batch_dir, "directory of scenario configs")
      ->required()
      ->check(CLI::ExistingDirectory);
  bt->add_option("--out", batch_out, "parent directory for per-scenario outputs");
  bt->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  bt->add_flag("--svg", batch_svg, "also write simplex.svg per scenario");
  bt->add_option("--seed", seed, "reserved, currently unused")->group("");
  bt->callback([&] {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(batch_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw ValidationError("batch: no *.json scenarios in '" + batch_dir + "'");
    }

    std::vector<BatchResult> results(files.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
      for (size_t i = cursor.fetch_add(1); i < files.size(); i = cursor.fetch_add(1)) {
        BatchResult& r = results[i];
        r.stem = files[i].stem().string();
        const std::string dest = (fs::path(batch_out) / r.stem).string();
        try {
          const RunSummary s = run_scenario(parse_scenario_file(files[i].string()),
                                            dest, batch_svg);
          std::string line = "ok, rest point residual " + std::to_string(s.rest_residual);
          if (s.ledger_max_residual) {
            line += ", ledger max residual " + std::to_string(*s.ledger_max_residual);
          }
          r.line = line;
        } catch (const ValidationError& e) {
          r.code = 2;
          r.line = std::string("validation error: ") + e.what();
        } catch (const NumericalError& e) {
          r.code = 3;
          r.line = std::string("numerical failure: ") + e.what();
        } catch (const DomainError& e) {
          r.code = 4;
          r.line = std::string("domain error: ") + e.what();
        } catch (const CertificationError& e) {
          r.code = 4;
          r.line = std::string("certification failure: ") + e.what();
        } catch (const std::exception& e) {
          r.code = 3;
          r.line = std::string("error: ") + e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    const size_t n_workers = std::min<size_t>(jobs, files.size());
    for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const auto& r : results) {
      std::cout << r.stem << ": " << r.line << "\n";
      exit_code = std::max(exit_code, r.code);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 4;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
