#include "ergoscope/io.hpp"

#include "ergoscope/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergoscope {

using nlohmann::json;
using nlohmann::ordered_json;

nlohmann::ordered_json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_to_json: matrix must be square");
  }
  ordered_json j;
  j["dim"] = m.rows();
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    throw std::invalid_argument("matrix_from_json: need dim, re, im fields");
  }
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (dim < 1 || re.size() != static_cast<std::size_t>(dim * dim) ||
      im.size() != re.size()) {
    throw std::invalid_argument("matrix_from_json: entry count != dim^2");
  }
  CMatrix m(dim, dim);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k, ++idx) {
      m(i, k) = Complex(re[idx], im[idx]);
    }
  }
  return m;
}

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

DensityMatrix load_density_matrix(const std::string& path) {
  return DensityMatrix::from_matrix(matrix_from_json(parse_file(path)));
}

HamiltonianOp load_hamiltonian(const std::string& path) {
  return HamiltonianOp::from_matrix(matrix_from_json(parse_file(path)));
}

CoarseGraining load_coarse_graining(const std::string& path,
                                    const HamiltonianOp* h) {
  const json j = parse_file(path);
  if (j.is_array()) {
    std::vector<CMatrix> projectors;
    projectors.reserve(j.size());
    for (const auto& entry : j) projectors.push_back(matrix_from_json(entry));
    return CoarseGraining::from_projectors(projectors);
  }
  if (j.is_object() && j.value("type", "") == "energy") {
    if (!h) {
      throw std::invalid_argument(
          "load_coarse_graining: energy descriptor needs a Hamiltonian");
    }
    const double de = j.at("dE").get<double>();
    const double origin = j.value("origin", h->ground_energy());
    return energy_coarse_graining(*h, de, origin);
  }
  throw std::invalid_argument(
      "load_coarse_graining: expected a projector list or an energy descriptor");
}

nlohmann::ordered_json beta_to_json(const BetaSolution& sol) {
  ordered_json j;
  j["beta"] = std::isinf(sol.beta) ? json("inf") : json(sol.beta);
  j["achieved_entropy"] = sol.achieved_entropy;
  j["target_entropy"] = sol.target_entropy;
  j["iterations"] = sol.iterations;
  j["clamped"] = sol.clamped;
  return j;
}

namespace {

void flatten_beta(ordered_json& j, const std::string& prefix,
                  const BetaSolution& sol) {
  j[prefix] = std::isinf(sol.beta) ? json("inf") : json(sol.beta);
  j[prefix + "_clamped"] = sol.clamped;
  j[prefix + "_iterations"] = sol.iterations;
  j[prefix + "_entropy_residual"] = sol.achieved_entropy - sol.target_entropy;
}

}  // namespace

nlohmann::ordered_json report_to_json(const ErgotropyReport& report) {
  ordered_json j;
  j["W"] = report.W;
  j["W_inf"] = report.W_inf;
  j["W_B"] = report.W_B;
  j["W_B_inf"] = report.W_B_inf;
  j["W_obs"] = report.W_obs;
  j["W_obs_inf"] = report.W_obs_inf;
  j["S_Sh"] = report.S_Sh;
  j["S_B"] = report.S_B;
  j["S_C"] = report.S_C;
  j["S_vN"] = report.S_vN;
  flatten_beta(j, "beta_B", report.beta_B);
  flatten_beta(j, "beta_obs", report.beta_obs);
  return j;
}

nlohmann::ordered_json estimate_to_json(const McEstimate& estimate) {
  ordered_json j;
  j["mean"] = estimate.mean;
  j["stderr"] = estimate.std_error;
  j["shots"] = estimate.shots;
  j["seed"] = estimate.seed;
  j["workers"] = estimate.workers;
  return j;
}

std::string format_sig12(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_shot_log_csv(const std::string& path,
                        const std::vector<WorkSample>& samples) {
  std::ostringstream out;
  out << "shot_index,outcome,work\n";
  for (const WorkSample& s : samples) {
    out << s.shot_index << ",";
    if (s.outcome) out << *s.outcome;
    out << "," << format_sig12(s.work) << "\n";
  }
  write_text_file(path, out.str());
}

void write_scenario_csv(const std::string& path, const ScenarioResult& result) {
  std::ostringstream out;
  out << "t,energy_true,energy_cg,bound_halfwidth,S_shannon,S_boltzmann,"
         "S_obs,S_th_global,W_obs_inf_true,W_obs_inf_cg,W_band_lo,W_band_hi\n";
  for (const ScenarioRow& r : result.rows) {
    out << format_sig12(r.t) << "," << format_sig12(r.energy_true) << ","
        << format_sig12(r.energy_cg) << "," << format_sig12(r.bound_halfwidth)
        << "," << format_sig12(r.s_shannon) << "," << format_sig12(r.s_boltzmann)
        << "," << format_sig12(r.s_obs) << "," << format_sig12(r.s_th_global)
        << "," << format_sig12(r.w_obs_inf_true) << ","
        << format_sig12(r.w_obs_inf_cg) << "," << format_sig12(r.w_band_lo)
        << "," << format_sig12(r.w_band_hi) << "\n";
  }
  write_text_file(path, out.str());
}

nlohmann::ordered_json scenario_config_to_json(const ScenarioConfig& config) {
  ordered_json j;
  j["L"] = config.chain.sites;
  j["n"] = config.chain.particles;
  j["T"] = config.chain.hop;
  j["Tp"] = config.chain.hop2;
  j["V"] = config.chain.coupling;
  j["Vp"] = config.chain.coupling2;
  switch (config.de_rule.kind) {
    case DeltaERule::Kind::GlobalGap:
      j["dE_rule"] = "global";
      break;
    case DeltaERule::Kind::LocalGap:
      j["dE_rule"] = "local";
      break;
    case DeltaERule::Kind::Explicit:
      j["dE_rule"] = config.de_rule.value;
      break;
  }
  j["t_max"] = config.t_max;
  j["t_steps"] = config.t_steps;
  j["seed"] = config.seed;
  return j;
}

ScenarioConfig scenario_config_from_json(const json& j) {
  ScenarioConfig config;
  config.chain.sites = j.value("L", config.chain.sites);
  config.chain.particles = j.value("n", config.chain.particles);
  config.chain.hop = j.value("T", config.chain.hop);
  config.chain.hop2 = j.value("Tp", config.chain.hop2);
  config.chain.coupling = j.value("V", config.chain.coupling);
  config.chain.coupling2 = j.value("Vp", config.chain.coupling2);
  if (j.contains("dE_rule")) {
    const auto& rule = j.at("dE_rule");
    if (rule.is_number()) {
      config.de_rule.kind = DeltaERule::Kind::Explicit;
      config.de_rule.value = rule.get<double>();
    } else if (rule.get<std::string>() == "global") {
      config.de_rule.kind = DeltaERule::Kind::GlobalGap;
    } else if (rule.get<std::string>() == "local") {
      config.de_rule.kind = DeltaERule::Kind::LocalGap;
    } else {
      throw std::invalid_argument(
          "scenario config: dE_rule must be \"global\", \"local\", or a number");
    }
  }
  config.t_max = j.value("t_max", config.t_max);
  config.t_steps = j.value("t_steps", config.t_steps);
  config.seed = j.value("seed", config.seed);
  return config;
}

nlohmann::ordered_json scenario_metadata_json(const ScenarioConfig& config,
                                              const ScenarioMetadata& meta) {
  ordered_json j;
  j["version"] = kVersion;
  j["config"] = scenario_config_to_json(config);
  j["seed"] = config.seed;
  j["H_int_norm"] = meta.h_int_norm;
  j["dE"] = meta.delta_e;
  j["E0"] = meta.e0;
  j["E1"] = meta.e1;
  j["sector_dim"] = meta.sector_dim;
  j["outcome_cells"] = meta.outcome_cells;
  j["initial_state"] = meta.initial_state;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace ergoscope
