#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace ergoscope {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Absolute tolerance on max |A - A^dag| entry for inputs that are
// constructed, not measured.
inline constexpr double kHermTol = 1e-10;

/// Deterministic, portable RNG (xoshiro256** seeded through splitmix64).
/// Identical (seed, stream) yields an identical draw sequence regardless of
/// platform or standard library. Parallel workers derive their own stream;
/// a stream is never shared.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform double in [0, 1).
  double uniform();
  /// Standard normal via Box-Muller (no libstdc++ distribution involved).
  double gaussian();
  /// Standard complex normal, E|z|^2 = 1.
  Complex complex_gaussian();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Eigendecomposition of a Hermitian matrix. Column j of `eigenvectors`
/// pairs with `eigenvalues[j]`; eigenvalues ascend.
struct Spectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

/// Max |A_ij - conj(A_ji)| over all entries.
double hermiticity_defect(const CMatrix& a);

/// Hermitian eigendecomposition with a fixed deterministic convention:
/// each eigenvector is phase-normalized (largest-magnitude entry real
/// positive) and columns are ordered by ascending eigenvalue with a
/// lexicographic tiebreak on entries, so degenerate spectra reproduce
/// bit-identically in golden tests.
/// Throws std::invalid_argument on non-square or non-Hermitian input,
/// naming the largest asymmetry.
Spectrum eigh(const CMatrix& a);

/// Largest singular value; equals max |eigenvalue| for Hermitian input.
double operator_norm(const CMatrix& a);

/// Kronecker product, (A x B)[i*p+k, j*q+l] = A(i,j) B(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase correction, so the distribution is exactly Haar.
/// Consumes dim*dim complex Gaussians from `rng`, row-major.
CMatrix haar_unitary(Eigen::Index dim, SeededRng& rng);

}  // namespace ergoscope
