// Command-line front end: golden three-level runner, fermionic-chain
// scenario, ergotropy report, protocol Monte-Carlo runner, and the
// Haar-averaging verifier.
//
// Exit codes: 0 success, 1 assertion/statistical failure, 2 usage/config
// error.

#include "ergoscope/io.hpp"
#include "ergoscope/three_level.hpp"
#include "ergoscope/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ergoscope;
using nlohmann::ordered_json;

// Thrown when a run completed but a check did not hold (exit 1); everything
// else that escapes a command counts as a usage/config problem (exit 2).
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------
// three-level

struct GoldenRow {
  std::string name;
  double computed;
  double target;
};

int run_three_level(const std::vector<double>& energies,
                    const std::string& format, const std::string& out_path) {
  if (energies.size() != 3) {
    throw std::invalid_argument("--energies needs exactly three values");
  }
  const ThreeLevelFixture fx =
      three_level_fixture(energies[0], energies[1], energies[2]);

  std::vector<GoldenRow> rows;
  auto add = [&rows](const std::string& name, double computed, double target) {
    rows.push_back({name, computed, target});
  };
  add("W_B(rho_A)", boltzmann_ergotropy(fx.rho_a, fx.h, fx.cg), fx.w_b_a);
  add("W_B(rho_B)", boltzmann_ergotropy(fx.rho_b, fx.h, fx.cg), fx.w_b_b);
  add("W_B(rho_C)", boltzmann_ergotropy(fx.rho_c, fx.h, fx.cg), fx.w_b_c);
  add("W_B(rho_D)", boltzmann_ergotropy(fx.rho_d, fx.h, fx.cg), fx.w_b_d);
  add("W_obs(rho_A)", observational_ergotropy(fx.rho_a, fx.h, fx.cg), fx.w_obs_a);
  add("W_obs(rho_B)", observational_ergotropy(fx.rho_b, fx.h, fx.cg), fx.w_obs_b);
  add("W_obs(rho_C)", observational_ergotropy(fx.rho_c, fx.h, fx.cg), fx.w_obs_c);
  add("W_obs(rho_D)", observational_ergotropy(fx.rho_d, fx.h, fx.cg), fx.w_obs_d);
  add("W_blind(rho_A)",
      blind_shot(fx.rho_a, fx.h, fx.cg, fx.swap_unitary).work, fx.blind_a);
  add("W_blind(rho_B)",
      blind_shot(fx.rho_b, fx.h, fx.cg, fx.swap_unitary).work, fx.blind_b);
  add("W_blind(rho_C)",
      blind_shot(fx.rho_c, fx.h, fx.cg, fx.swap_unitary).work, fx.blind_c);
  add("W_blind(rho_D)",
      blind_shot(fx.rho_d, fx.h, fx.cg, fx.swap_unitary).work, fx.blind_d);

  constexpr double kTol = 1e-12;
  bool all_pass = true;
  ordered_json jrows = ordered_json::array();
  std::ostringstream table;
  table << std::left << std::setw(16) << "quantity" << std::setw(22)
        << "computed" << std::setw(22) << "target" << std::setw(20) << "|error|"
        << "status\n";
  for (const GoldenRow& r : rows) {
    const double err = std::abs(r.computed - r.target);
    const bool pass = err <= kTol;
    all_pass = all_pass && pass;
    table << std::left << std::setw(16) << r.name << std::setw(22)
          << format_sig12(r.computed) << std::setw(22) << format_sig12(r.target)
          << std::setw(20) << format_sig12(err) << (pass ? "PASS" : "FAIL")
          << "\n";
    jrows.push_back({{"name", r.name},
                     {"computed", r.computed},
                     {"target", r.target},
                     {"error", err},
                     {"pass", pass}});
  }

  if (format == "json") {
    ordered_json j;
    j["version"] = kVersion;
    j["energies"] = energies;
    j["tolerance"] = kTol;
    j["rows"] = jrows;
    j["all_pass"] = all_pass;
    emit(j, out_path);
  } else if (format == "csv") {
    std::ostringstream csv;
    csv << "quantity,computed,target,error,pass\n";
    for (const GoldenRow& r : rows) {
      const double err = std::abs(r.computed - r.target);
      csv << r.name << "," << format_sig12(r.computed) << ","
          << format_sig12(r.target) << "," << format_sig12(err) << ","
          << (err <= kTol ? "PASS" : "FAIL") << "\n";
    }
    if (out_path.empty()) {
      std::cout << csv.str();
    } else {
      write_text_file(out_path, csv.str());
    }
  } else {
    if (!out_path.empty()) write_text_file(out_path, table.str());
    std::cout << table.str();
  }
  if (!all_pass) throw CheckFailed("three-level golden values disagree");
  return 0;
}

// ---------------------------------------------------------------------------
// chain

int run_chain(const std::string& config_path, const std::string& out_path,
              std::optional<std::uint64_t> seed_override) {
  ScenarioConfig config;
  if (!config_path.empty()) {
    config = scenario_config_from_json(
        nlohmann::json::parse(read_text_file(config_path)));
  }
  if (seed_override) config.seed = *seed_override;

  const ScenarioResult result = figure2_scenario(config);

  write_scenario_csv(out_path, result);
  std::string meta_path = out_path;
  if (meta_path.size() > 4 && meta_path.substr(meta_path.size() - 4) == ".csv") {
    meta_path = meta_path.substr(0, meta_path.size() - 4);
  }
  meta_path += ".meta.json";
  emit(scenario_metadata_json(config, result.meta), meta_path);

  std::cout << "sector dimension " << result.meta.sector_dim << ", "
            << result.meta.outcome_cells << " outcome cells, dE = "
            << format_sig12(result.meta.delta_e) << ", |H_int| = "
            << format_sig12(result.meta.h_int_norm) << "\n";
  std::cout << "wrote " << result.rows.size() << " rows to " << out_path
            << " (metadata: " << meta_path << ")\n";

  const double ln_dim = std::log(static_cast<double>(result.meta.sector_dim));
  const double e_ref = result.rows.front().energy_true;
  for (const ScenarioRow& row : result.rows) {
    if (row.w_obs_inf_true < row.w_band_lo - 1e-9 ||
        row.w_obs_inf_true > row.w_band_hi + 1e-9) {
      std::ostringstream msg;
      msg << "band containment violated at t = " << row.t << ": "
          << row.w_obs_inf_true << " outside [" << row.w_band_lo << ", "
          << row.w_band_hi << "]";
      throw CheckFailed(msg.str());
    }
    if (std::abs(row.energy_true - e_ref) > 1e-9) {
      std::ostringstream msg;
      msg << "energy drift at t = " << row.t << ": " << row.energy_true
          << " vs " << e_ref;
      throw CheckFailed(msg.str());
    }
    if (row.s_obs > ln_dim + 1e-9) {
      std::ostringstream msg;
      msg << "S_obs above ln(sector dim) at t = " << row.t;
      throw CheckFailed(msg.str());
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report

int run_report(const std::string& state_path, const std::string& ham_path,
               const std::string& cg_path, const std::string& out_path) {
  const HamiltonianOp h = load_hamiltonian(ham_path);
  const DensityMatrix rho = load_density_matrix(state_path);
  const CoarseGraining cg = load_coarse_graining(cg_path, &h);
  ordered_json j;
  j["version"] = kVersion;
  j["report"] = report_to_json(ergotropy_report(rho, h, cg));
  emit(j, out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// protocol

int run_protocol(const std::string& state_path, const std::string& ham_path,
                 const std::string& cg_path, int stage, long shots,
                 std::uint64_t seed, int workers, const std::string& out_path,
                 const std::string& shot_log_path) {
  if (stage != 1 && stage != 2) {
    throw std::invalid_argument("--stage must be 1 or 2");
  }
  if (shots < 2) {
    throw std::invalid_argument("--shots must be at least 2");
  }
  const HamiltonianOp h = load_hamiltonian(ham_path);
  const DensityMatrix rho = load_density_matrix(state_path);
  const CoarseGraining cg = load_coarse_graining(cg_path, &h);

  const double exact = (stage == 1) ? boltzmann_ergotropy(rho, h, cg)
                                    : observational_ergotropy(rho, h, cg);
  const ShotFn fn = (stage == 1) ? make_stage1_shot_fn(rho, h, cg)
                                 : make_stage2_shot_fn(rho, h, cg);
  std::vector<WorkSample> log;
  const McEstimate estimate = mc_estimate(
      fn, shots, seed, workers, shot_log_path.empty() ? nullptr : &log);
  if (!shot_log_path.empty()) write_shot_log_csv(shot_log_path, log);

  double z = 0.0;
  if (estimate.std_error > 0.0) {
    z = (estimate.mean - exact) / estimate.std_error;
  } else if (std::abs(estimate.mean - exact) > 1e-9) {
    z = std::numeric_limits<double>::infinity();
  }

  ordered_json j;
  j["version"] = kVersion;
  j["config"] = {{"state", state_path}, {"hamiltonian", ham_path},
                 {"cg", cg_path},       {"stage", stage},
                 {"shots", shots},      {"seed", seed},
                 {"workers", estimate.workers}};
  j["estimate"] = estimate_to_json(estimate);
  j["exact"] = exact;
  j["z"] = z;
  emit(j, out_path);
  if (!out_path.empty()) {
    std::cout << "mean = " << format_sig12(estimate.mean) << " +- "
              << format_sig12(estimate.std_error) << ", exact = "
              << format_sig12(exact) << ", z = " << format_sig12(z) << "\n";
  }
  if (std::abs(z) > 4.0) {
    std::ostringstream msg;
    msg << "Monte-Carlo mean is " << z << " standard errors from the formula";
    throw CheckFailed(msg.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// haar-check

int run_haar_check(const std::string& state_path, const std::string& cg_path,
                   const std::string& ham_path, long shots, std::uint64_t seed,
                   bool wrong_reference) {
  if (shots < 1) throw std::invalid_argument("--shots must be at least 1");
  std::optional<HamiltonianOp> h;
  if (!ham_path.empty()) h = load_hamiltonian(ham_path);
  const DensityMatrix rho = load_density_matrix(state_path);
  const CoarseGraining cg =
      load_coarse_graining(cg_path, h ? &*h : nullptr);

  double distance = 0.0;
  if (wrong_reference) {
    // Negative control: compare against I/d, which is not the averaged
    // state unless the coarse-graining is trivial.
    const DensityMatrix mean = haar_average_state(rho, cg, shots, seed);
    distance = trace_distance(mean, DensityMatrix::maximally_mixed(rho.dim()));
  } else {
    distance = verify_haar_average(rho, cg, shots, seed);
  }
  const double threshold = 5.0 / std::sqrt(static_cast<double>(shots));
  std::cout << "trace distance = " << format_sig12(distance)
            << ", threshold = " << format_sig12(threshold) << " ("
            << (distance <= threshold ? "PASS" : "FAIL") << ")\n";
  if (distance > threshold) {
    throw CheckFailed("averaged state strays from the coarse-grained state");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergoscope: work extraction from coarse-grained measurements"};
  app.set_version_flag("--version", ergoscope::kVersion);
  app.require_subcommand(1);

  // three-level
  auto* three = app.add_subcommand(
      "three-level", "golden three-level example against closed forms");
  std::vector<double> energies{0.0, 1.0, 2.0};
  std::string tl_format = "table";
  std::string tl_out;
  three->add_option("--energies", energies, "level energies E0,E1,E2")
      ->delimiter(',')
      ->expected(3);
  three->add_option("--format", tl_format, "table|json|csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  three->add_option("--out", tl_out, "write output to this path");

  // chain
  auto* chain = app.add_subcommand(
      "chain", "fermionic-chain scenario: CSV time series plus metadata");
  std::string chain_config, chain_out = "chain_scenario.csv";
  std::optional<std::uint64_t> chain_seed;
  chain->add_option("--config", chain_config, "scenario config JSON");
  chain->add_option("--out", chain_out, "output CSV path");
  chain->add_option("--seed", chain_seed, "override the config seed");

  // report
  auto* report = app.add_subcommand(
      "report", "ergotropy report for a state, Hamiltonian, coarse-graining");
  std::string rp_state, rp_ham, rp_cg, rp_out;
  report->add_option("--state", rp_state)->required();
  report->add_option("--hamiltonian", rp_ham)->required();
  report->add_option("--cg", rp_cg)->required();
  report->add_option("--out", rp_out);

  // protocol
  auto* protocol = app.add_subcommand(
      "protocol", "Monte-Carlo extraction run against the exact formula");
  std::string pr_state, pr_ham, pr_cg, pr_out, pr_shot_log;
  int pr_stage = 2;
  long pr_shots = 10000;
  std::uint64_t pr_seed = 0;
  int pr_workers = 1;
  protocol->add_option("--state", pr_state)->required();
  protocol->add_option("--hamiltonian", pr_ham)->required();
  protocol->add_option("--cg", pr_cg)->required();
  protocol->add_option("--stage", pr_stage, "1 (measured) or 2 (unmeasured)");
  protocol->add_option("--shots", pr_shots);
  protocol->add_option("--seed", pr_seed);
  protocol->add_option("--workers", pr_workers)->envname("ERGOSCOPE_WORKERS");
  protocol->add_option("--out", pr_out, "estimate JSON path");
  protocol->add_option("--shot-log", pr_shot_log, "per-shot CSV path");

  // haar-check
  auto* haar = app.add_subcommand(
      "haar-check", "verify block-Haar averaging against rho_cg");
  std::string hc_state, hc_cg, hc_ham;
  long hc_shots = 10000;
  std::uint64_t hc_seed = 0;
  bool hc_wrong = false;
  haar->add_option("--state", hc_state)->required();
  haar->add_option("--cg", hc_cg)->required();
  haar->add_option("--hamiltonian", hc_ham,
                   "needed when the coarse-graining file is an energy descriptor");
  haar->add_option("--shots", hc_shots);
  haar->add_option("--seed", hc_seed);
  haar->add_flag("--wrong-reference", hc_wrong,
                 "self-test: compare against I/d to exercise the FAIL path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (three->parsed()) return run_three_level(energies, tl_format, tl_out);
    if (chain->parsed()) return run_chain(chain_config, chain_out, chain_seed);
    if (report->parsed()) return run_report(rp_state, rp_ham, rp_cg, rp_out);
    if (protocol->parsed()) {
      return run_protocol(pr_state, pr_ham, pr_cg, pr_stage, pr_shots, pr_seed,
                          pr_workers, pr_out, pr_shot_log);
    }
    if (haar->parsed()) {
      return run_haar_check(hc_state, hc_cg, hc_ham, hc_shots, hc_seed,
                            hc_wrong);
    }
  } catch (const CheckFailed& e) {
    std::cerr << "FAIL: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
