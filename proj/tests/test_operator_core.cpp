#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

using namespace ergoscope;
using namespace ergoscope::testing;

TEST_CASE("SeededRng is deterministic per (seed, stream)") {
  SeededRng a(42, 1), b(42, 1), c(42, 2);
  bool all_equal = true;
  bool any_differs = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t xa = a.next_u64();
    all_equal = all_equal && (xa == b.next_u64());
    any_differs = any_differs || (xa != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("SeededRng uniform and gaussian look sane") {
  SeededRng rng(7);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.05);
}

TEST_CASE("eigh: identity and diagonal sort") {
  const Spectrum id = eigh(CMatrix::Identity(3, 3));
  for (int k = 0; k < 3; ++k) CHECK(id.eigenvalues[k] == doctest::Approx(1.0));

  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = 0.0;
  d(2, 2) = 1.0;
  const Spectrum spec = eigh(d);
  CHECK(spec.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(spec.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(spec.eigenvalues[2] == doctest::Approx(2.0));
}

TEST_CASE("eigh: reconstruction and unitarity on random Hermitian input") {
  SeededRng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.uniform() * 31);
    const CMatrix a = random_hermitian(dim, rng);
    const Spectrum spec = eigh(a);
    const CMatrix rebuilt = spec.eigenvectors *
                            spec.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                            spec.eigenvectors.adjoint();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    CHECK((rebuilt - a).cwiseAbs().maxCoeff() / scale <= 1e-10);
    CHECK((spec.eigenvectors.adjoint() * spec.eigenvectors -
           CMatrix::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    for (Eigen::Index k = 1; k < dim; ++k) {
      CHECK(spec.eigenvalues[k] >= spec.eigenvalues[k - 1]);
    }
  }
}

TEST_CASE("eigh: deterministic output for identical input") {
  SeededRng rng(13);
  const CMatrix a = random_hermitian(8, rng);
  const Spectrum s1 = eigh(a);
  const Spectrum s2 = eigh(a);
  CHECK((s1.eigenvalues - s2.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.eigenvectors - s2.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigh: rejects non-square and non-Hermitian input") {
  CHECK_THROWS_AS(eigh(CMatrix::Zero(2, 3)), std::invalid_argument);
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;  // asymmetry 1
  try {
    eigh(a);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("operator_norm: diagonal, identity, spectral oracle") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -3.0;
  CHECK(operator_norm(d) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(operator_norm(CMatrix::Identity(5, 5)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(operator_norm(CMatrix::Zero(2, 3)), std::invalid_argument);

  SeededRng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_hermitian(6, rng);
    const RVector eigs = eigh(a).eigenvalues;
    const double expected = std::max(std::abs(eigs[0]), std::abs(eigs[5]));
    CHECK(std::abs(operator_norm(a) - expected) <= 1e-10);
  }
}

TEST_CASE("kron: identities, number operator, index formula") {
  CHECK((kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)) -
         CMatrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CMatrix n1 = CMatrix::Zero(2, 2);
  n1(1, 1) = 1.0;
  const CMatrix total = kron(n1, CMatrix::Identity(2, 2)) +
                        kron(CMatrix::Identity(2, 2), n1);
  RVector expected(4);
  expected << 0, 1, 1, 2;
  for (int k = 0; k < 4; ++k) {
    CHECK(total(k, k).real() == doctest::Approx(expected[k]));
    CHECK(std::abs(total(k, k).imag()) == 0.0);
  }

  SeededRng rng(19);
  const CMatrix a = random_matrix(2, rng);
  const CMatrix b = random_matrix(3, rng);
  const CMatrix k = kron(a, b);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) {
          CHECK(std::abs(k(3 * i + p, 3 * j + q) - a(i, j) * b(p, q)) <= 1e-14);
        }
      }
    }
  }
}

TEST_CASE("haar_unitary: d=1 phase, unitarity, d=0 rejected") {
  SeededRng rng(23);
  const CMatrix u1 = haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-12);

  for (const Eigen::Index dim : {2, 3, 5, 8}) {
    const CMatrix u = haar_unitary(dim, rng);
    CHECK((u.adjoint() * u - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
  CHECK_THROWS_AS(haar_unitary(0, rng), std::invalid_argument);
}

TEST_CASE("haar_unitary: mean of U|0><0|U^dag approaches I/d") {
  SeededRng rng(29);
  const Eigen::Index dim = 3;
  CMatrix acc = CMatrix::Zero(dim, dim);
  const int shots = 10000;
  for (int s = 0; s < shots; ++s) {
    const CMatrix u = haar_unitary(dim, rng);
    acc.noalias() += u.col(0) * u.col(0).adjoint();
  }
  acc /= shots;
  const double dist = trace_distance(DensityMatrix::unchecked(acc),
                                     DensityMatrix::maximally_mixed(dim));
  CHECK(dist <= 0.05);
}

TEST_CASE("haar_unitary: left invariance of overlap statistics (KS test)") {
  // |<0|WU|0>|^2 must be distributed like |<0|U|0>|^2 for fixed W.
  SeededRng rng_w(31);
  const CMatrix w = haar_unitary(4, rng_w);
  SeededRng rng_a(37), rng_b(41);
  const int n = 10000;
  std::vector<double> plain, rotated;
  plain.reserve(n);
  rotated.reserve(n);
  for (int s = 0; s < n; ++s) {
    const CMatrix u = haar_unitary(4, rng_a);
    plain.push_back(std::norm(u(0, 0)));
    const CMatrix v = w * haar_unitary(4, rng_b);
    rotated.push_back(std::norm(v(0, 0)));
  }
  // Critical value ~1.63 sqrt(2/n) at alpha = 0.01.
  CHECK(ks_statistic(plain, rotated) <= 0.025);
}
