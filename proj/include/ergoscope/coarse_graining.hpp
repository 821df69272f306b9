#pragma once

#include "ergoscope/quantum_state.hpp"

#include <string>
#include <vector>

namespace ergoscope {

/// Ordered family of mutually orthogonal projectors summing to the identity.
/// Each macrostate is held as a d x V_i isometry B_i (orthonormal columns,
/// P_i = B_i B_i^dag); full projectors are materialized on demand. Block-Haar
/// sampling and subspace passive states work on the isometry factors.
class CoarseGraining {
 public:
  static CoarseGraining from_projectors(const std::vector<CMatrix>& projectors,
                                        std::vector<std::string> labels = {});
  static CoarseGraining from_isometries(std::vector<CMatrix> isometries,
                                        std::vector<std::string> labels = {});
  /// Single trivial macrostate {I}.
  static CoarseGraining trivial(Eigen::Index dim);
  /// Rank-1 projectors onto the computational basis.
  static CoarseGraining fine_grained(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  int outcome_count() const { return static_cast<int>(isometries_.size()); }
  const CMatrix& isometry(int i) const { return isometries_.at(i); }
  CMatrix projector(int i) const;
  int volume(int i) const { return volumes_.at(i); }
  const std::vector<int>& volumes() const { return volumes_; }
  const std::string& label(int i) const { return labels_.at(i); }
  /// Flat state P_i / V_i on macrostate i.
  DensityMatrix macrostate_mixture(int i) const;

 private:
  CoarseGraining(Eigen::Index dim, std::vector<CMatrix> isometries,
                 std::vector<int> volumes, std::vector<std::string> labels)
      : dim_(dim),
        isometries_(std::move(isometries)),
        volumes_(std::move(volumes)),
        labels_(std::move(labels)) {}

  Eigen::Index dim_;
  std::vector<CMatrix> isometries_;
  std::vector<int> volumes_;
  std::vector<std::string> labels_;
};

/// Outcome probabilities p_i = tr[P_i rho] with the macrostate volumes.
struct MeasurementStats {
  RVector probs;
  std::vector<int> volumes;
};

MeasurementStats measure_probs(const DensityMatrix& rho, const CoarseGraining& cg);
MeasurementStats measure_probs(const PureState& psi, const CoarseGraining& cg);

/// P_i rho P_i / p_i. Throws on outcomes with p_i <= 1e-12.
DensityMatrix post_measurement_state(const DensityMatrix& rho,
                                     const CoarseGraining& cg, int outcome);

/// rho_cg = sum_i (p_i / V_i) P_i.
DensityMatrix coarse_grained_state(const MeasurementStats& stats,
                                   const CoarseGraining& cg);

/// -sum p ln p (0 ln 0 := 0).
double shannon_entropy(const MeasurementStats& stats);
/// sum p ln V.
double boltzmann_entropy(const MeasurementStats& stats);
/// Shannon plus mean Boltzmann entropy.
double observational_entropy(const MeasurementStats& stats);

/// Projectors onto spans of eigenvectors binned by eigenvalue into
/// [origin + m dE, origin + (m+1) dE); empty bins omitted, volumes are the
/// bin multiplicities. The anchor is a free parameter; nothing fixes it
/// physically. Defaults to the ground energy.
CoarseGraining energy_coarse_graining(const HamiltonianOp& h, double resolution,
                                      double origin);
CoarseGraining energy_coarse_graining(const HamiltonianOp& h, double resolution);

}  // namespace ergoscope
