#include "ergoscope/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ergoscope {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::uint64_t a = seed;
  std::uint64_t b = ~stream;
  std::uint64_t x = splitmix64(a) ^ (splitmix64(b) + 0x9e3779b97f4a7c15ull);
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t SeededRng::next_u64() {
  // xoshiro256**
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0,1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Complex SeededRng::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im) * std::numbers::sqrt2 / 2.0;
}

double hermiticity_defect(const CMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << who << ": matrix must be square, got " << a.rows() << "x" << a.cols();
    throw std::invalid_argument(msg.str());
  }
}

// Rotate each column so its largest-magnitude entry (lowest index on ties)
// is real positive.
void fix_phases(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double m = std::abs(v(i, j));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    if (best > 0.0) v.col(j) *= std::conj(v(imax, j)) / best;
  }
}

bool column_lex_less(const CMatrix& v, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Complex x = v(i, a), y = v(i, b);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

}  // namespace

Spectrum eigh(const CMatrix& a) {
  require_square(a, "eigh");
  if (a.rows() == 0) throw std::invalid_argument("eigh: empty matrix");
  const double defect = hermiticity_defect(a);
  if (defect > kHermTol) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian, max |A - A^dag| entry = " << defect;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigensolver failed to converge");
  }

  Spectrum spec{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(spec.eigenvectors);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(a.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (spec.eigenvalues[i] != spec.eigenvalues[j]) {
      return spec.eigenvalues[i] < spec.eigenvalues[j];
    }
    return column_lex_less(spec.eigenvectors, i, j);
  });

  Spectrum out;
  out.eigenvalues.resize(a.rows());
  out.eigenvectors.resize(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    out.eigenvalues[j] = spec.eigenvalues[order[static_cast<std::size_t>(j)]];
    out.eigenvectors.col(j) = spec.eigenvectors.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

double operator_norm(const CMatrix& a) {
  require_square(a, "operator_norm");
  if (a.rows() == 0) return 0.0;
  // sqrt of the top eigenvalue of A^dag A; stable and deterministic.
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.adjoint() * a,
                                                Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix haar_unitary(Eigen::Index dim, SeededRng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dimension must be >= 1");
  CMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double m = std::abs(rjj);
    q.col(j) *= (m > 0.0) ? rjj / m : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace ergoscope
