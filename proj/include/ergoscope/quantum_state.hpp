#pragma once

#include "ergoscope/operator_core.hpp"

namespace ergoscope {

/// Trace-one positive Hermitian operator. Validated on construction:
/// trace 1 and Hermiticity to 1e-10, smallest eigenvalue >= -1e-10.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(CMatrix rho);
  static DensityMatrix pure(const CVector& amplitudes);
  static DensityMatrix maximally_mixed(Eigen::Index dim);
  /// Skips validation; for states that are valid by construction
  /// (tensor powers, spectral rebuilds) where a d^3 check would dominate.
  static DensityMatrix unchecked(CMatrix rho);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  /// Ascending eigenvalues (fresh eigh; not cached).
  RVector eigenvalues() const;

 private:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Unit-norm state vector.
class PureState {
 public:
  static PureState from_amplitudes(CVector amplitudes);
  /// Computational basis vector |index>.
  static PureState basis_vector(Eigen::Index dim, Eigen::Index index);

  const CVector& amplitudes() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  DensityMatrix to_density_matrix() const;

 private:
  explicit PureState(CVector v) : v_(std::move(v)) {}
  CVector v_;
};

/// Hermitian operator with its spectral decomposition cached at
/// construction; every thermal / passive formula reads the spectrum.
class HamiltonianOp {
 public:
  static HamiltonianOp from_matrix(CMatrix h);

  const CMatrix& matrix() const { return m_; }
  const Spectrum& spectrum() const { return spec_; }
  Eigen::Index dim() const { return m_.rows(); }
  double ground_energy() const { return spec_.eigenvalues[0]; }

 private:
  HamiltonianOp(CMatrix m, Spectrum s) : m_(std::move(m)), spec_(std::move(s)) {}
  CMatrix m_;
  Spectrum spec_;
};

/// -sum lambda ln lambda in nats; eigenvalues below 1e-14 count as zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Re tr[H rho]; throws if the imaginary part exceeds 1e-10.
double mean_energy(const DensityMatrix& rho, const HamiltonianOp& h);
double mean_energy(const PureState& psi, const HamiltonianOp& h);

/// exp(-iHt) psi through the cached spectrum (hbar = 1).
PureState evolve(const PureState& psi, const HamiltonianOp& h, double t);

/// rho^(tensor N). Rejects d^N above `dim_cap` with a pointer to the
/// multiset path (finite_n_min_energy) that avoids the blowup.
DensityMatrix tensor_power(const DensityMatrix& rho, int n,
                           Eigen::Index dim_cap = 4096);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace ergoscope
