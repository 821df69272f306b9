#pragma once

#include "ergoscope/extraction_protocol.hpp"
#include "ergoscope/fermion_chain.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace ergoscope {

/// Row-major complex matrix as {"dim": d, "re": [...], "im": [...]}.
nlohmann::ordered_json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

/// Loaders validate the domain invariants (trace, Hermiticity, positivity).
DensityMatrix load_density_matrix(const std::string& path);
HamiltonianOp load_hamiltonian(const std::string& path);

/// Either a JSON list of projector matrices or a descriptor
/// {"type": "energy", "dE": x, "origin": y} resolved against `h`
/// (origin defaults to the ground energy when omitted).
CoarseGraining load_coarse_graining(const std::string& path,
                                    const HamiltonianOp* h = nullptr);

nlohmann::ordered_json report_to_json(const ErgotropyReport& report);
nlohmann::ordered_json estimate_to_json(const McEstimate& estimate);
nlohmann::ordered_json beta_to_json(const BetaSolution& sol);

/// shot_index,outcome,work rows; outcome empty for unmeasured protocols.
void write_shot_log_csv(const std::string& path,
                        const std::vector<WorkSample>& samples);

/// The scenario CSV: fixed column order, '.' decimal, comma separator, LF
/// endings, header row, 12 significant digits.
void write_scenario_csv(const std::string& path, const ScenarioResult& result);
nlohmann::ordered_json scenario_metadata_json(const ScenarioConfig& config,
                                              const ScenarioMetadata& meta);

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_config_to_json(const ScenarioConfig& config);

/// %.12g rendering used for every float that lands in a CSV.
std::string format_sig12(double value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ergoscope
