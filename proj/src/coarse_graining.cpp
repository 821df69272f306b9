#include "ergoscope/coarse_graining.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ergoscope {

namespace {

constexpr double kProjTol = 1e-10;
constexpr double kProbClip = 1e-12;

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = "outcome" + std::to_string(i);
  return labels;
}

// One d x d unitarity check on the stacked isometries covers orthonormality
// within each block, cross-block orthogonality, and completeness at once.
void validate_isometries(Eigen::Index dim, const std::vector<CMatrix>& isos) {
  Eigen::Index total = 0;
  for (const auto& b : isos) {
    if (b.rows() != dim) {
      throw std::invalid_argument("CoarseGraining: isometry row count != dim");
    }
    if (b.cols() < 1) {
      throw std::invalid_argument("CoarseGraining: empty macrostate");
    }
    total += b.cols();
  }
  if (total != dim) {
    std::ostringstream msg;
    msg << "CoarseGraining: volumes sum to " << total << ", expected " << dim;
    throw std::invalid_argument(msg.str());
  }
  CMatrix stacked(dim, dim);
  Eigen::Index col = 0;
  for (const auto& b : isos) {
    stacked.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  const double defect =
      (stacked.adjoint() * stacked - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > kProjTol) {
    std::ostringstream msg;
    msg << "CoarseGraining: macrostate bases are not orthonormal/complete, "
        << "max defect = " << defect;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

CoarseGraining CoarseGraining::from_projectors(const std::vector<CMatrix>& projectors,
                                               std::vector<std::string> labels) {
  if (projectors.empty()) {
    throw std::invalid_argument("CoarseGraining: no projectors given");
  }
  const Eigen::Index dim = projectors.front().rows();
  std::vector<CMatrix> isometries;
  isometries.reserve(projectors.size());
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const CMatrix& p = projectors[i];
    if (p.rows() != dim || p.cols() != dim) {
      throw std::invalid_argument("CoarseGraining: projector dimension mismatch");
    }
    const double idem = (p * p - p).cwiseAbs().maxCoeff();
    if (idem > kProjTol) {
      std::ostringstream msg;
      msg << "CoarseGraining: projector " << i
          << " is not idempotent, max |P^2 - P| = " << idem;
      throw std::invalid_argument(msg.str());
    }
    const Spectrum spec = eigh(p);
    const int volume = static_cast<int>(std::lround(p.trace().real()));
    if (volume < 1) {
      throw std::invalid_argument("CoarseGraining: projector has zero rank");
    }
    // Unit-eigenvalue eigenvectors form the macrostate basis.
    isometries.push_back(spec.eigenvectors.rightCols(volume));
  }
  return from_isometries(std::move(isometries), std::move(labels));
}

CoarseGraining CoarseGraining::from_isometries(std::vector<CMatrix> isometries,
                                               std::vector<std::string> labels) {
  if (isometries.empty()) {
    throw std::invalid_argument("CoarseGraining: no macrostates given");
  }
  const Eigen::Index dim = isometries.front().rows();
  validate_isometries(dim, isometries);
  std::vector<int> volumes;
  volumes.reserve(isometries.size());
  for (const auto& b : isometries) volumes.push_back(static_cast<int>(b.cols()));
  if (labels.empty()) labels = default_labels(isometries.size());
  if (labels.size() != isometries.size()) {
    throw std::invalid_argument("CoarseGraining: label count mismatch");
  }
  return CoarseGraining(dim, std::move(isometries), std::move(volumes),
                        std::move(labels));
}

CoarseGraining CoarseGraining::trivial(Eigen::Index dim) {
  std::vector<CMatrix> isos{CMatrix::Identity(dim, dim)};
  return from_isometries(std::move(isos), {"all"});
}

CoarseGraining CoarseGraining::fine_grained(Eigen::Index dim) {
  std::vector<CMatrix> isos;
  isos.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    isos.push_back(CMatrix::Identity(dim, dim).col(i));
  }
  return from_isometries(std::move(isos));
}

CMatrix CoarseGraining::projector(int i) const {
  const CMatrix& b = isometries_.at(i);
  return b * b.adjoint();
}

DensityMatrix CoarseGraining::macrostate_mixture(int i) const {
  return DensityMatrix::unchecked(projector(i) / static_cast<double>(volume(i)));
}

namespace {

MeasurementStats stats_from_raw(RVector probs, const CoarseGraining& cg) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] < -kProbClip) {
      std::ostringstream msg;
      msg << "measure_probs: outcome " << i << " has probability " << probs[i];
      throw std::runtime_error(msg.str());
    }
    if (probs[i] < 0.0) probs[i] = 0.0;  // numerical dust from projection
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "measure_probs: probabilities sum to " << total;
    throw std::runtime_error(msg.str());
  }
  probs /= total;
  return MeasurementStats{std::move(probs), cg.volumes()};
}

}  // namespace

MeasurementStats measure_probs(const DensityMatrix& rho, const CoarseGraining& cg) {
  if (rho.dim() != cg.dim()) {
    throw std::invalid_argument("measure_probs: dimension mismatch");
  }
  RVector probs(cg.outcome_count());
  for (int i = 0; i < cg.outcome_count(); ++i) {
    const CMatrix& b = cg.isometry(i);
    probs[i] = (b.adjoint() * rho.matrix() * b).trace().real();
  }
  return stats_from_raw(std::move(probs), cg);
}

MeasurementStats measure_probs(const PureState& psi, const CoarseGraining& cg) {
  if (psi.dim() != cg.dim()) {
    throw std::invalid_argument("measure_probs: dimension mismatch");
  }
  RVector probs(cg.outcome_count());
  for (int i = 0; i < cg.outcome_count(); ++i) {
    probs[i] = (cg.isometry(i).adjoint() * psi.amplitudes()).squaredNorm();
  }
  return stats_from_raw(std::move(probs), cg);
}

DensityMatrix post_measurement_state(const DensityMatrix& rho,
                                     const CoarseGraining& cg, int outcome) {
  if (rho.dim() != cg.dim()) {
    throw std::invalid_argument("post_measurement_state: dimension mismatch");
  }
  if (outcome < 0 || outcome >= cg.outcome_count()) {
    throw std::invalid_argument("post_measurement_state: no such outcome");
  }
  const CMatrix& b = cg.isometry(outcome);
  const CMatrix block = b.adjoint() * rho.matrix() * b;
  const double p = block.trace().real();
  if (p <= kProbClip) {
    std::ostringstream msg;
    msg << "post_measurement_state: outcome " << outcome
        << " has probability " << p << "; the projected state is undefined";
    throw std::runtime_error(msg.str());
  }
  return DensityMatrix::from_matrix(b * (block / p) * b.adjoint());
}

DensityMatrix coarse_grained_state(const MeasurementStats& stats,
                                   const CoarseGraining& cg) {
  if (stats.probs.size() != cg.outcome_count()) {
    throw std::invalid_argument("coarse_grained_state: stats/outcome length mismatch");
  }
  CMatrix out = CMatrix::Zero(cg.dim(), cg.dim());
  for (int i = 0; i < cg.outcome_count(); ++i) {
    if (stats.probs[i] == 0.0) continue;
    const CMatrix& b = cg.isometry(i);
    out.noalias() += (stats.probs[i] / cg.volume(i)) * (b * b.adjoint());
  }
  return DensityMatrix::unchecked(std::move(out));
}

double shannon_entropy(const MeasurementStats& stats) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < stats.probs.size(); ++i) {
    const double p = stats.probs[i];
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double boltzmann_entropy(const MeasurementStats& stats) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < stats.probs.size(); ++i) {
    s += stats.probs[i] * std::log(static_cast<double>(stats.volumes[i]));
  }
  return s;
}

double observational_entropy(const MeasurementStats& stats) {
  return shannon_entropy(stats) + boltzmann_entropy(stats);
}

CoarseGraining energy_coarse_graining(const HamiltonianOp& h, double resolution,
                                      double origin) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("energy_coarse_graining: resolution must be > 0");
  }
  const Spectrum& spec = h.spectrum();
  // Half-open bins; the 1e-9 nudge keeps eigenvalues sitting on a bin edge
  // (up to roundoff) in the upper bin.
  std::map<long, std::vector<Eigen::Index>> bins;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    const long m = static_cast<long>(
        std::floor((spec.eigenvalues[k] - origin) / resolution + 1e-9));
    bins[m].push_back(k);
  }
  std::vector<CMatrix> isometries;
  std::vector<std::string> labels;
  isometries.reserve(bins.size());
  for (const auto& [m, cols] : bins) {
    CMatrix b(h.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      b.col(static_cast<Eigen::Index>(j)) = spec.eigenvectors.col(cols[j]);
    }
    isometries.push_back(std::move(b));
    std::ostringstream label;
    label << "E[" << origin + static_cast<double>(m) * resolution << ","
          << origin + static_cast<double>(m + 1) * resolution << ")";
    labels.push_back(label.str());
  }
  return CoarseGraining::from_isometries(std::move(isometries), std::move(labels));
}

CoarseGraining energy_coarse_graining(const HamiltonianOp& h, double resolution) {
  return energy_coarse_graining(h, resolution, h.ground_energy());
}

}  // namespace ergoscope
