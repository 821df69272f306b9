#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ergoscope/three_level.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace ergoscope;
using namespace ergoscope::testing;

TEST_CASE("CoarseGraining validation") {
  // Not idempotent.
  CMatrix half = 0.5 * CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(CoarseGraining::from_projectors({half, half}),
                  std::invalid_argument);
  // Incomplete family.
  CMatrix p0 = CMatrix::Zero(3, 3);
  p0(0, 0) = 1.0;
  CHECK_THROWS_AS(CoarseGraining::from_projectors({p0}), std::invalid_argument);
  // Overlapping projectors.
  CMatrix p01 = CMatrix::Zero(3, 3);
  p01(0, 0) = p01(1, 1) = 1.0;
  CMatrix p12 = CMatrix::Zero(3, 3);
  p12(1, 1) = p12(2, 2) = 1.0;
  CHECK_THROWS_AS(CoarseGraining::from_projectors({p01, p12}),
                  std::invalid_argument);
}

TEST_CASE("projector accessor rebuilds P_i from the isometry") {
  SeededRng rng(2);
  const CoarseGraining cg = random_coarse_graining(6, rng, {2, 4});
  for (int i = 0; i < cg.outcome_count(); ++i) {
    const CMatrix p = cg.projector(i);
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(p.trace().real() - cg.volume(i)) <= 1e-10);
  }
  CHECK((cg.projector(0) + cg.projector(1) - CMatrix::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("measure_probs: flat macrostate, maximally mixed, the 1/8-7/8 state") {
  const ThreeLevelFixture fx = three_level_fixture();

  const MeasurementStats flat = measure_probs(fx.cg.macrostate_mixture(1), fx.cg);
  CHECK(flat.probs[0] == doctest::Approx(0.0));
  CHECK(flat.probs[1] == doctest::Approx(1.0));

  const MeasurementStats mixed =
      measure_probs(DensityMatrix::maximally_mixed(3), fx.cg);
  CHECK(mixed.probs[0] == doctest::Approx(1.0 / 3.0));
  CHECK(mixed.probs[1] == doctest::Approx(2.0 / 3.0));

  const MeasurementStats d = measure_probs(fx.rho_d, fx.cg);
  CHECK(d.probs[0] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(d.probs[1] == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(d.volumes[0] == 1);
  CHECK(d.volumes[1] == 2);

  CHECK_THROWS_AS(measure_probs(DensityMatrix::maximally_mixed(2), fx.cg),
                  std::invalid_argument);
}

TEST_CASE("post-measurement state: projected doublet, invariance, flat outcome") {
  const ThreeLevelFixture fx = three_level_fixture();

  const DensityMatrix projected = post_measurement_state(fx.rho_d, fx.cg, 1);
  CHECK((projected.matrix() - fx.rho_a.matrix()).cwiseAbs().maxCoeff() <= 1e-12);

  // State already supported in macrostate 1 is unchanged.
  const DensityMatrix same = post_measurement_state(fx.rho_c, fx.cg, 1);
  CHECK((same.matrix() - fx.rho_c.matrix()).cwiseAbs().maxCoeff() <= 1e-12);

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(3);
  const DensityMatrix flat = post_measurement_state(mixed, fx.cg, 1);
  CHECK((flat.matrix() - fx.cg.macrostate_mixture(1).matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  // rho_A has zero weight on the ground macrostate.
  CHECK_THROWS_AS(post_measurement_state(fx.rho_a, fx.cg, 0), std::runtime_error);
}

TEST_CASE("coarse-grained state: three-level fixtures and the fine-grained limit") {
  const ThreeLevelFixture fx = three_level_fixture();

  const DensityMatrix cg_c =
      coarse_grained_state(measure_probs(fx.rho_c, fx.cg), fx.cg);
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(1, 1) = expected(2, 2) = 0.5;
  CHECK((cg_c.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);

  const DensityMatrix cg_d =
      coarse_grained_state(measure_probs(fx.rho_d, fx.cg), fx.cg);
  expected.setZero();
  expected(0, 0) = 0.125;
  expected(1, 1) = expected(2, 2) = 7.0 / 16.0;
  CHECK((cg_d.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);

  // Rank-1 coarse-graining in the eigenbasis of a diagonal state: identity.
  const CoarseGraining fine = CoarseGraining::fine_grained(3);
  const DensityMatrix diag = fx.rho_d;
  const DensityMatrix cg_fine =
      coarse_grained_state(measure_probs(diag, fine), fine);
  CHECK((cg_fine.matrix() - diag.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("entropies from stats") {
  MeasurementStats deterministic{RVector(2), {1, 2}};
  deterministic.probs << 0.0, 1.0;
  CHECK(shannon_entropy(deterministic) == doctest::Approx(0.0));
  CHECK(boltzmann_entropy(deterministic) == doctest::Approx(std::log(2.0)));
  CHECK(observational_entropy(deterministic) == doctest::Approx(std::log(2.0)));

  MeasurementStats rank1{RVector(3), {1, 1, 1}};
  rank1.probs << 0.2, 0.5, 0.3;
  CHECK(boltzmann_entropy(rank1) == doctest::Approx(0.0));

  MeasurementStats two_level{RVector(2), {1, 2}};
  two_level.probs << 0.125, 0.875;
  const double expected = -(0.125 * std::log(0.125) + 0.875 * std::log(0.875)) +
                          0.875 * std::log(2.0);
  CHECK(observational_entropy(two_level) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("energy coarse-graining: single bin, per-level bins, hand binning") {
  SeededRng rng(4);
  const HamiltonianOp h = random_hamiltonian(5, rng);
  const double range =
      h.spectrum().eigenvalues[4] - h.spectrum().eigenvalues[0];

  const CoarseGraining whole =
      energy_coarse_graining(h, 2.0 * range + 1.0, h.ground_energy());
  CHECK(whole.outcome_count() == 1);
  CHECK(whole.volume(0) == 5);

  double min_gap = range;
  for (int k = 1; k < 5; ++k) {
    min_gap = std::min(min_gap, h.spectrum().eigenvalues[k] -
                                    h.spectrum().eigenvalues[k - 1]);
  }
  const CoarseGraining fine =
      energy_coarse_graining(h, 0.9 * min_gap, h.ground_energy());
  CHECK(fine.outcome_count() == 5);

  CMatrix diag = CMatrix::Zero(3, 3);
  diag(1, 1) = 0.4;
  diag(2, 2) = 1.1;
  const HamiltonianOp h3 = HamiltonianOp::from_matrix(diag);
  const CoarseGraining bins = energy_coarse_graining(h3, 0.5, 0.0);
  REQUIRE(bins.outcome_count() == 2);
  CHECK(bins.volume(0) == 2);  // {0, 0.4}
  CHECK(bins.volume(1) == 1);  // {1.1}

  CHECK_THROWS_AS(energy_coarse_graining(h3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("identity S_vN(rho_cg) = S_Sh + S_B on random pairs") {
  SeededRng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.uniform() * 15);
    const DensityMatrix rho = random_density_matrix(dim, rng);
    const CoarseGraining cg = random_coarse_graining(dim, rng);
    const MeasurementStats stats = measure_probs(rho, cg);
    const double s_cg = von_neumann_entropy(coarse_grained_state(stats, cg));
    CHECK(std::abs(s_cg - observational_entropy(stats)) <= 1e-10);
    CHECK(observational_entropy(stats) >= boltzmann_entropy(stats) - 1e-12);
    CHECK(boltzmann_entropy(stats) >= -1e-12);
    CHECK(observational_entropy(stats) <=
          std::log(static_cast<double>(dim)) + 1e-10);
  }
}

TEST_CASE("re-measuring the coarse-grained state changes nothing") {
  SeededRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density_matrix(6, rng);
    const CoarseGraining cg = random_coarse_graining(6, rng);
    const MeasurementStats before = measure_probs(rho, cg);
    const MeasurementStats after =
        measure_probs(coarse_grained_state(before, cg), cg);
    CHECK((before.probs - after.probs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("dephasing consistency of the post-measurement ensemble") {
  SeededRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density_matrix(5, rng);
    const CoarseGraining cg = random_coarse_graining(5, rng);
    const MeasurementStats stats = measure_probs(rho, cg);
    CMatrix ensemble = CMatrix::Zero(5, 5);
    CMatrix dephased = CMatrix::Zero(5, 5);
    for (int i = 0; i < cg.outcome_count(); ++i) {
      const CMatrix p = cg.projector(i);
      dephased += p * rho.matrix() * p;
      if (stats.probs[i] > 1e-12) {
        ensemble += stats.probs[i] * post_measurement_state(rho, cg, i).matrix();
      }
    }
    CHECK((ensemble - dephased).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
