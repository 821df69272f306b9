#pragma once

#include "ergoscope/ergotropy.hpp"

#include <functional>
#include <optional>

namespace ergoscope {

/// One realization of the partially random extraction. `outcome` is set by
/// the Stage-1 (measured) protocol only.
struct WorkSample {
  std::optional<int> outcome;
  double work = 0.0;
  long shot_index = 0;
};

/// Monte-Carlo mean with its standard error; reproducible from (seed,
/// workers), which are both part of the record.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long shots = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Block-diagonal unitary in the macrostate decomposition, each block Haar
/// on its subspace. Commutes with every P_i. Draw order: one Haar unitary
/// per macrostate, in outcome order.
CMatrix block_haar_unitary(const CoarseGraining& cg, SeededRng& rng);

/// V_pi V_sigma^dag: eigenvectors of sigma (descending population) onto
/// energy eigenvectors (ascending energy), so U sigma U^dag is passive.
CMatrix optimal_unitary_for(const DensityMatrix& sigma, const HamiltonianOp& h);

/// Stage 1: sample an outcome, project, randomize the macrostate, apply the
/// outcome's optimal unitary. Work is accounted against the pre-measurement
/// tr[H rho]. Consumes one uniform draw then one V_i-dim Haar draw.
WorkSample stage1_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                       const CoarseGraining& cg, SeededRng& rng,
                       long shot_index = 0);

/// Stage 2: no measurement; one full block-Haar draw, then the unitary that
/// makes rho_cg passive. Consumes one block-Haar draw.
WorkSample stage2_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                       const CoarseGraining& cg, SeededRng& rng,
                       long shot_index = 0);

/// Direct application of a guessed unitary, no randomization: the
/// deterministic work tr[H rho] - tr[H U rho U^dag].
WorkSample blind_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                      const CoarseGraining& cg, const CMatrix& guess_unitary,
                      long shot_index = 0);

using ShotFn = std::function<WorkSample(SeededRng&, long)>;

/// Precomputed-closure versions for Monte-Carlo loops. Shot-for-shot they
/// consume the rng exactly like the free functions above.
ShotFn make_stage1_shot_fn(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg);
ShotFn make_stage2_shot_fn(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg);

/// Mean and standard error of `shots` samples. Worker w handles a contiguous
/// index range with its own (seed, stream = w) substream; partial sums are
/// reduced in worker order, so output is bit-stable for fixed (seed,
/// workers). Optional `log` receives every sample by index.
McEstimate mc_estimate(const ShotFn& shot_fn, long shots, std::uint64_t seed,
                       int workers = 1, std::vector<WorkSample>* log = nullptr);

/// Monte-Carlo average of (+)U rho U^dag(+) over `shots` block-Haar draws.
DensityMatrix haar_average_state(const DensityMatrix& rho,
                                 const CoarseGraining& cg, long shots,
                                 std::uint64_t seed);

/// Trace distance between the `shots`-sample mean of (+)U rho U^dag(+) and
/// rho_cg; O(1/sqrt(shots)) when the averaging theorem holds.
double verify_haar_average(const DensityMatrix& rho, const CoarseGraining& cg,
                           long shots, std::uint64_t seed);

}  // namespace ergoscope
