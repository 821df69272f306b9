#include "ergoscope/quantum_state.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ergoscope {

namespace {

constexpr double kTraceTol = 1e-10;
constexpr double kEigNegTol = 1e-10;
constexpr double kEntropyZero = 1e-14;

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) {
    std::ostringstream msg;
    msg << who << ": dimension mismatch, " << a << " vs " << b;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(CMatrix rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
  }
  if (!rho.allFinite()) {
    throw std::invalid_argument("DensityMatrix: entries must be finite");
  }
  const double defect = hermiticity_defect(rho);
  if (defect > kHermTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: not Hermitian, max |A - A^dag| entry = " << defect;
    throw std::invalid_argument(msg.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace = " << tr.real() << " + " << tr.imag()
        << "i, expected 1";
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (rho + rho.adjoint()),
                                                Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kEigNegTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: not positive semidefinite, min eigenvalue = " << min_eig;
    throw std::invalid_argument(msg.str());
  }
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::pure(const CVector& amplitudes) {
  return PureState::from_amplitudes(amplitudes).to_density_matrix();
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be >= 1");
  CMatrix m = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::unchecked(CMatrix rho) {
  return DensityMatrix(std::move(rho));
}

RVector DensityMatrix::eigenvalues() const { return eigh(m_).eigenvalues; }

PureState PureState::from_amplitudes(CVector amplitudes) {
  if (amplitudes.size() == 0) {
    throw std::invalid_argument("PureState: empty amplitude vector");
  }
  if (!amplitudes.allFinite()) {
    throw std::invalid_argument("PureState: amplitudes must be finite");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "PureState: norm = " << norm << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  return PureState(std::move(amplitudes));
}

PureState PureState::basis_vector(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("basis_vector: index out of range");
  }
  CVector v = CVector::Zero(dim);
  v[index] = 1.0;
  return PureState(std::move(v));
}

DensityMatrix PureState::to_density_matrix() const {
  return DensityMatrix::unchecked(v_ * v_.adjoint());
}

HamiltonianOp HamiltonianOp::from_matrix(CMatrix h) {
  Spectrum spec = eigh(h);  // validates square + Hermitian
  return HamiltonianOp(std::move(h), std::move(spec));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const RVector eigs = rho.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double lambda = eigs[i];
    if (lambda > kEntropyZero) s -= lambda * std::log(lambda);
  }
  return s;
}

namespace {

double checked_real_trace_product(const CMatrix& h, const CMatrix& rho,
                                  const char* who) {
  // tr[H rho] = sum_ij H_ij rho_ji without forming the product.
  const Complex tr = (h.array() * rho.transpose().array()).sum();
  if (std::abs(tr.imag()) > 1e-10) {
    std::ostringstream msg;
    msg << who << ": tr[H rho] has imaginary part " << tr.imag();
    throw std::runtime_error(msg.str());
  }
  return tr.real();
}

}  // namespace

double mean_energy(const DensityMatrix& rho, const HamiltonianOp& h) {
  require_same_dim(rho.dim(), h.dim(), "mean_energy");
  return checked_real_trace_product(h.matrix(), rho.matrix(), "mean_energy");
}

double mean_energy(const PureState& psi, const HamiltonianOp& h) {
  require_same_dim(psi.dim(), h.dim(), "mean_energy");
  const Complex e = psi.amplitudes().dot(h.matrix() * psi.amplitudes());
  if (std::abs(e.imag()) > 1e-10) {
    throw std::runtime_error("mean_energy: <H> has a nonreal part");
  }
  return e.real();
}

PureState evolve(const PureState& psi, const HamiltonianOp& h, double t) {
  require_same_dim(psi.dim(), h.dim(), "evolve");
  const Spectrum& spec = h.spectrum();
  CVector coeffs = spec.eigenvectors.adjoint() * psi.amplitudes();
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs[k] *= std::exp(Complex(0.0, -spec.eigenvalues[k] * t));
  }
  CVector out = spec.eigenvectors * coeffs;
  out /= out.norm();  // spectral evolution preserves the norm up to roundoff
  return PureState::from_amplitudes(std::move(out));
}

DensityMatrix tensor_power(const DensityMatrix& rho, int n, Eigen::Index dim_cap) {
  if (n < 1) throw std::invalid_argument("tensor_power: n must be >= 1");
  double dims = 1.0;
  for (int k = 0; k < n; ++k) {
    dims *= static_cast<double>(rho.dim());
    if (dims > static_cast<double>(dim_cap)) {
      std::ostringstream msg;
      msg << "tensor_power: d^N = " << rho.dim() << "^" << n << " exceeds cap "
          << dim_cap << "; use finite_n_min_energy, which works on the "
          << "eigenvalue multiset instead of the full matrix";
      throw std::length_error(msg.str());
    }
  }
  CMatrix out = rho.matrix();
  for (int k = 1; k < n; ++k) out = kron(out, rho.matrix());
  return DensityMatrix::unchecked(std::move(out));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "trace_distance");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix() - sigma.matrix(),
                                                Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace ergoscope
