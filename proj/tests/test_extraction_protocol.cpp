#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ergoscope/three_level.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace ergoscope;
using namespace ergoscope::testing;

TEST_CASE("block-Haar unitaries: phases, block structure, unitarity") {
  SeededRng rng(1);
  const CoarseGraining fine = CoarseGraining::fine_grained(4);
  const CMatrix diag = block_haar_unitary(fine, rng);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) {
        CHECK(std::abs(std::abs(diag(i, j)) - 1.0) <= 1e-12);
      } else {
        CHECK(std::abs(diag(i, j)) <= 1e-14);
      }
    }
  }

  const CoarseGraining cg = random_coarse_graining(6, rng, {2, 3, 1});
  for (int draw = 0; draw < 5; ++draw) {
    const CMatrix u = block_haar_unitary(cg, rng);
    CHECK((u.adjoint() * u - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() <=
          1e-10);
    for (int i = 0; i < cg.outcome_count(); ++i) {
      const CMatrix p = cg.projector(i);
      CHECK((u * p - p * u).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("MC average of the block-randomized state approaches rho_cg") {
  const ThreeLevelFixture fx = three_level_fixture();
  const double dist = verify_haar_average(fx.rho_c, fx.cg, 10000, 77);
  CHECK(dist <= 0.05);

  // Fixed point: rho already coarse-grained.
  const DensityMatrix flat =
      coarse_grained_state(measure_probs(fx.rho_d, fx.cg), fx.cg);
  CHECK(verify_haar_average(flat, fx.cg, 10000, 78) <= 0.03);

  // Trivial coarse-graining: average lands on I/d.
  const CoarseGraining whole = CoarseGraining::trivial(3);
  const DensityMatrix mean = haar_average_state(fx.rho_c, whole, 10000, 79);
  CHECK(trace_distance(mean, DensityMatrix::maximally_mixed(3)) <= 0.05);
}

TEST_CASE("off-block coherences of the MC-averaged state vanish") {
  SeededRng rng(3);
  const DensityMatrix rho = random_density_matrix(5, rng);
  const CoarseGraining cg = random_coarse_graining(5, rng, {2, 3});
  const long shots = 4000;
  const DensityMatrix mean = haar_average_state(rho, cg, shots, 80);
  const double limit = 5.0 / std::sqrt(static_cast<double>(shots));
  for (int i = 0; i < cg.outcome_count(); ++i) {
    for (int j = 0; j < cg.outcome_count(); ++j) {
      if (i == j) continue;
      const CMatrix block = cg.isometry(i).adjoint() * mean.matrix() *
                            cg.isometry(j);
      CHECK(operator_norm(CMatrix(block * block.adjoint())) <= limit * limit);
    }
  }
}

TEST_CASE("optimal unitary: passivizes its state, reproduces the 0<->2 swap") {
  const ThreeLevelFixture fx = three_level_fixture();

  const DensityMatrix flat1 = fx.cg.macrostate_mixture(1);
  const CMatrix u = optimal_unitary_for(flat1, fx.h);
  const CMatrix final_state = u * flat1.matrix() * u.adjoint();
  const DensityMatrix pi = passive_state(flat1, fx.h);
  CHECK((final_state - pi.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  // Same action as the swap |0><2| + |2><0| + |1><1| up to phases within
  // the degenerate doublet: check the moved populations instead of entries.
  CHECK(std::abs((u * fx.rho_b.matrix() * u.adjoint())(0, 0).real() - 1.0) <=
        1e-9);

  SeededRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HamiltonianOp h = random_hamiltonian(4, rng);
    const DensityMatrix sigma = random_density_matrix(4, rng);
    const CMatrix opt = optimal_unitary_for(sigma, h);
    CHECK((opt * sigma.matrix() * opt.adjoint() -
           passive_state(sigma, h).matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    // Already-passive input: energy unchanged.
    const DensityMatrix pi2 = passive_state(sigma, h);
    const CMatrix u2 = optimal_unitary_for(pi2, h);
    CHECK(std::abs((u2 * pi2.matrix() * u2.adjoint() * h.matrix()).trace().real() -
                   mean_energy(pi2, h)) <= 1e-9);
  }
}

TEST_CASE("no sampled unitary extracts more than the optimal one") {
  SeededRng rng(7);
  const HamiltonianOp h = random_hamiltonian(3, rng);
  const DensityMatrix sigma = random_density_matrix(3, rng);
  const CMatrix opt = optimal_unitary_for(sigma, h);
  const double best = (opt * sigma.matrix() * opt.adjoint() * h.matrix())
                          .trace()
                          .real();
  for (int s = 0; s < 1000; ++s) {
    const CMatrix w = haar_unitary(3, rng);
    const double e =
        (w * sigma.matrix() * w.adjoint() * h.matrix()).trace().real();
    CHECK(best <= e + 1e-9);
  }
}

TEST_CASE("stage 1: deterministic-outcome source reproduces W^{B,i}") {
  const ThreeLevelFixture fx = three_level_fixture();
  const DensityMatrix flat1 = fx.cg.macrostate_mixture(1);
  const RVector per_outcome =
      boltzmann_ergotropy_per_outcome(flat1, fx.h, fx.cg);
  const McEstimate est =
      mc_estimate(make_stage1_shot_fn(flat1, fx.h, fx.cg), 10000, 101);
  CHECK(std::abs(est.mean - per_outcome[1]) <= 3.0 * est.std_error + 1e-12);
}

TEST_CASE("stage 1: rank-1 coarse-graining gives zero-variance shots") {
  SeededRng rng(9);
  const HamiltonianOp h = random_hamiltonian(3, rng);
  // rho diagonal in the measurement basis = the energy eigenbasis.
  std::vector<CMatrix> projectors;
  for (int i = 0; i < 3; ++i) {
    const CVector v = h.spectrum().eigenvectors.col(i);
    projectors.push_back(v * v.adjoint());
  }
  const CoarseGraining cg = CoarseGraining::from_projectors(projectors);
  CMatrix rho_m = 0.2 * projectors[0] + 0.5 * projectors[1] + 0.3 * projectors[2];
  const DensityMatrix rho = DensityMatrix::from_matrix(rho_m);

  // Every outcome is pure, so the optimal unitary lands it on the ground
  // state: work = tr[H rho] - E0 on every shot.
  const double expected = mean_energy(rho, h) - h.ground_energy();
  SeededRng shot_rng(11);
  for (int s = 0; s < 50; ++s) {
    const WorkSample sample = stage1_shot(rho, h, cg, shot_rng, s);
    CHECK(sample.outcome.has_value());
    CHECK(sample.work == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("stage 1: MC mean within three standard errors on rho_D") {
  const ThreeLevelFixture fx = three_level_fixture();
  const McEstimate est =
      mc_estimate(make_stage1_shot_fn(fx.rho_d, fx.h, fx.cg), 10000, 103);
  CHECK(std::abs(est.mean - 0.4375) <= 3.0 * est.std_error);
}

TEST_CASE("stage 2: flat input makes every shot exact") {
  const ThreeLevelFixture fx = three_level_fixture();
  const DensityMatrix flat =
      coarse_grained_state(measure_probs(fx.rho_d, fx.cg), fx.cg);
  const double w_obs = observational_ergotropy(flat, fx.h, fx.cg);
  SeededRng rng(13);
  for (int s = 0; s < 20; ++s) {
    const WorkSample sample = stage2_shot(flat, fx.h, fx.cg, rng, s);
    CHECK_FALSE(sample.outcome.has_value());
    CHECK(sample.work == doctest::Approx(w_obs).epsilon(1e-10));
  }
}

TEST_CASE("stage 2: MC mean within three standard errors on rho_D") {
  const ThreeLevelFixture fx = three_level_fixture();
  const McEstimate est =
      mc_estimate(make_stage2_shot_fn(fx.rho_d, fx.h, fx.cg), 10000, 107);
  CHECK(std::abs(est.mean - 0.1875) <= 3.0 * est.std_error);
}

TEST_CASE("stage 2: rank-1 coarse-graining diagonalizing rho has no variance") {
  SeededRng rng(15);
  const HamiltonianOp h = random_hamiltonian(3, rng);
  std::vector<CMatrix> projectors;
  for (int i = 0; i < 3; ++i) {
    const CVector v = h.spectrum().eigenvectors.col(i);
    projectors.push_back(v * v.adjoint());
  }
  const CoarseGraining cg = CoarseGraining::from_projectors(projectors);
  const DensityMatrix rho = DensityMatrix::from_matrix(
      CMatrix(0.6 * projectors[0] + 0.1 * projectors[1] + 0.3 * projectors[2]));
  const McEstimate est = mc_estimate(make_stage2_shot_fn(rho, h, cg), 100, 17);
  CHECK(est.std_error <= 1e-12);
}

TEST_CASE("single shots keep states physical and operators unitary") {
  SeededRng rng(19);
  const HamiltonianOp h = random_hamiltonian(5, rng);
  const DensityMatrix rho = random_density_matrix(5, rng);
  const CoarseGraining cg = random_coarse_graining(5, rng, {2, 3});
  const MeasurementStats stats = measure_probs(rho, cg);

  SeededRng shot_rng(21);
  for (int s = 0; s < 10; ++s) {
    const CMatrix r = block_haar_unitary(cg, shot_rng);
    CHECK((r.adjoint() * r - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <=
          1e-10);
    const int outcome = stats.probs[0] > 0.5 ? 0 : 1;
    const DensityMatrix projected = post_measurement_state(rho, cg, outcome);
    const CMatrix u_i = optimal_unitary_for(cg.macrostate_mixture(outcome), h);
    const CMatrix final_m =
        u_i * r * projected.matrix() * r.adjoint() * u_i.adjoint();
    CHECK_NOTHROW(DensityMatrix::from_matrix(final_m));
  }
}

TEST_CASE("blind extraction: swap-unitary closed forms") {
  const ThreeLevelFixture fx = three_level_fixture();
  CHECK(blind_shot(fx.rho_a, fx.h, fx.cg, fx.swap_unitary).work ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(blind_shot(fx.rho_b, fx.h, fx.cg, fx.swap_unitary).work ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(blind_shot(fx.rho_c, fx.h, fx.cg, fx.swap_unitary).work ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(blind_shot(fx.rho_d, fx.h, fx.cg, fx.swap_unitary).work ==
        doctest::Approx(-0.25).epsilon(1e-14));
  CHECK_THROWS_AS(
      blind_shot(fx.rho_a, fx.h, fx.cg, CMatrix::Identity(2, 2)),
      std::invalid_argument);
}

TEST_CASE("mc_estimate: constant shots, scaling, determinism, workers") {
  const ShotFn constant = [](SeededRng&, long idx) {
    return WorkSample{std::nullopt, 2.5, idx};
  };
  const McEstimate fixed = mc_estimate(constant, 100, 1);
  CHECK(fixed.mean == doctest::Approx(2.5));
  CHECK(fixed.std_error == doctest::Approx(0.0));

  CHECK_THROWS_AS(mc_estimate(constant, 1, 1), std::invalid_argument);

  const ShotFn noisy = [](SeededRng& rng, long idx) {
    return WorkSample{std::nullopt, rng.gaussian(), idx};
  };
  const McEstimate small = mc_estimate(noisy, 4000, 5);
  const McEstimate large = mc_estimate(noisy, 8000, 5);
  const double shrink = large.std_error / small.std_error;
  CHECK(shrink == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(0.2));

  // Same seed, same workers: bit-identical.
  const McEstimate a = mc_estimate(noisy, 1000, 9, 3);
  const McEstimate b = mc_estimate(noisy, 1000, 9, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  // Worker split changes the stream but stays statistically consistent.
  const McEstimate serial = mc_estimate(noisy, 8000, 9, 1);
  CHECK(std::abs(a.mean - serial.mean) <=
        4.0 * std::hypot(a.std_error, serial.std_error));

  // The log records every sample in index order.
  std::vector<WorkSample> log;
  mc_estimate(noisy, 100, 3, 4, &log);
  REQUIRE(log.size() == 100);
  bool indexed = true;
  for (std::size_t i = 0; i < log.size(); ++i) {
    indexed = indexed && log[i].shot_index == static_cast<long>(i);
  }
  CHECK(indexed);
}

TEST_CASE("free shot functions and closures share the rng contract") {
  const ThreeLevelFixture fx = three_level_fixture();
  SeededRng rng_a(31), rng_b(31);
  const ShotFn fn = make_stage1_shot_fn(fx.rho_d, fx.h, fx.cg);
  for (int s = 0; s < 20; ++s) {
    const WorkSample direct = stage1_shot(fx.rho_d, fx.h, fx.cg, rng_a, s);
    const WorkSample cached = fn(rng_b, s);
    CHECK(direct.work == doctest::Approx(cached.work).epsilon(1e-14));
    CHECK(direct.outcome == cached.outcome);
  }

  SeededRng rng_c(33), rng_d(33);
  const ShotFn fn2 = make_stage2_shot_fn(fx.rho_d, fx.h, fx.cg);
  for (int s = 0; s < 10; ++s) {
    const WorkSample direct = stage2_shot(fx.rho_d, fx.h, fx.cg, rng_c, s);
    const WorkSample cached = fn2(rng_d, s);
    CHECK(direct.work == doctest::Approx(cached.work).epsilon(1e-14));
  }
}

TEST_CASE("two-copy unconditional extraction matches the product formula") {
  // Randomizers act per copy, the extraction unitary acts globally on the
  // pair; the exact value is the observational ergotropy of rho (x) rho
  // under the product coarse-graining.
  const ThreeLevelFixture fx = three_level_fixture();
  const DensityMatrix rho = fx.rho_d;
  const CMatrix h2m = kron(fx.h.matrix(), CMatrix::Identity(3, 3)) +
                      kron(CMatrix::Identity(3, 3), fx.h.matrix());
  const HamiltonianOp h2 = HamiltonianOp::from_matrix(h2m);

  std::vector<CMatrix> joint;
  for (int i = 0; i < fx.cg.outcome_count(); ++i) {
    for (int j = 0; j < fx.cg.outcome_count(); ++j) {
      joint.push_back(kron(fx.cg.projector(i), fx.cg.projector(j)));
    }
  }
  const CoarseGraining cg2 = CoarseGraining::from_projectors(joint);
  const DensityMatrix rho2 = tensor_power(rho, 2);
  const double exact = observational_ergotropy(rho2, h2, cg2);

  // Two copies extract at least as much per copy as one.
  CHECK(exact / 2.0 >= observational_ergotropy(rho, fx.h, fx.cg) / 1.0 - 1e-9);

  const DensityMatrix rho2_cg =
      coarse_grained_state(measure_probs(rho2, cg2), cg2);
  const CMatrix u_opt = optimal_unitary_for(rho2_cg, h2);
  const double initial = mean_energy(rho2, h2);
  const ShotFn two_copy = [&](SeededRng& rng, long idx) {
    const CMatrix r = kron(block_haar_unitary(fx.cg, rng),
                           block_haar_unitary(fx.cg, rng));
    const CMatrix final_state =
        u_opt * r * rho2.matrix() * r.adjoint() * u_opt.adjoint();
    const double final_energy =
        (h2.matrix().array() * final_state.transpose().array()).sum().real();
    return WorkSample{std::nullopt, initial - final_energy, idx};
  };
  const McEstimate est = mc_estimate(two_copy, 8000, 271);
  CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error + 1e-12);
}

TEST_CASE("stage means respect the conditional-extraction ordering") {
  SeededRng rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    const HamiltonianOp h = random_hamiltonian(4, rng);
    const DensityMatrix rho = random_density_matrix(4, rng);
    const CoarseGraining cg = random_coarse_graining(4, rng, {2, 2});
    const McEstimate stage1 =
        mc_estimate(make_stage1_shot_fn(rho, h, cg), 4000, 41 + trial);
    const McEstimate stage2 =
        mc_estimate(make_stage2_shot_fn(rho, h, cg), 4000, 61 + trial);
    const double combined = std::hypot(stage1.std_error, stage2.std_error);
    CHECK(stage1.mean >= stage2.mean - 3.0 * combined);
  }
}
