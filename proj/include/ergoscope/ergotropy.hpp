#pragma once

#include "ergoscope/coarse_graining.hpp"

#include <span>
#include <utility>
#include <vector>

namespace ergoscope {

/// Result of matching a Gibbs state's entropy to a target.
/// `clamped` marks targets below the ground-degeneracy entropy ln(g0),
/// where beta = +inf and the achieved entropy stays at ln(g0).
struct BetaSolution {
  double beta = 0.0;  // in [0, +inf]
  double achieved_entropy = 0.0;
  double target_entropy = 0.0;
  int iterations = 0;
  bool clamped = false;
};

/// Same spectrum as sigma, populations sorted descending against energy
/// eigenvectors sorted ascending. Ties in either spectrum follow the fixed
/// eigh ordering; every member of the passive family shares tr[H pi].
DensityMatrix passive_state(const DensityMatrix& sigma, const HamiltonianOp& h);

/// W(rho, H) = tr[H (rho - pi)], the work a cyclic unitary can extract.
double ergotropy(const DensityMatrix& rho, const HamiltonianOp& h);

/// e^{-beta H} / Z through the cached spectrum, exponent-shifted by the
/// ground energy. beta = 0 gives I/d; beta = +inf the normalized projector
/// onto the ground eigenspace. Negative beta is rejected: the fixed-entropy
/// energy minimizer lives on the nonnegative-temperature branch.
DensityMatrix thermal_state(const HamiltonianOp& h, double beta);

/// tr[H rho_beta] and S_vN(rho_beta) without building the matrix.
double thermal_energy(const HamiltonianOp& h, double beta);
double thermal_entropy(const HamiltonianOp& h, double beta);

/// Bisection on beta >= 0 where S(rho_beta) decreases strictly from ln d
/// toward ln(g0). Residual |S - target| <= 1e-9 in the non-clamped branch
/// (the bracket is tightened to near machine width, well inside that).
BetaSolution solve_beta_for_entropy(const HamiltonianOp& h, double target_entropy);

/// Per-copy work from simultaneous extraction on infinitely many copies:
/// tr[H (rho - rho_beta)] with S_vN(rho_beta) = S_vN(rho).
double asymptotic_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h);

/// W^{B,i} = tr[H (rho - pi_i)], pi_i passive for (P_i/V_i, H); the work
/// extracted on average when the measurement reports outcome i.
RVector boltzmann_ergotropy_per_outcome(const DensityMatrix& rho,
                                        const HamiltonianOp& h,
                                        const CoarseGraining& cg);

/// Outcome-conditioned extraction: tr[H (rho - sum_i p_i pi_i)].
double boltzmann_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg);

/// Large-N limit of the outcome-conditioned protocol: thermal residual with
/// S_vN(rho_beta) = sum_i p_i ln V_i.
double boltzmann_ergotropy_asymptotic(const DensityMatrix& rho,
                                      const HamiltonianOp& h,
                                      const CoarseGraining& cg);

/// Unconditional extraction from the probability record alone:
/// tr[H (rho - pi_cg)], pi_cg passive for (rho_cg, H).
double observational_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h,
                               const CoarseGraining& cg);

/// Large-N limit of the unconditional protocol: thermal residual with
/// S_vN(rho_beta') = -sum p ln p + sum p ln V.
double observational_ergotropy_asymptotic(const DensityMatrix& rho,
                                          const HamiltonianOp& h,
                                          const CoarseGraining& cg);

/// One factor of a product state: `copies` tensor copies of `state`.
struct ProductPart {
  DensityMatrix state;
  long copies = 1;
};

/// Exact per-copy minimum of tr[H_N U (x)_i rho_i^{n_i} U^dag] / N over all
/// unitaries, N = sum n_i, without building d^N matrices: the product
/// eigenvalue multiset (descending) dotted with the H_N level-sum multiset
/// (ascending) is the passive pairing and hence the exact minimizer.
/// Rejects d^N above `multiset_cap` (default 1e6 scalars).
double finite_n_min_energy(std::span<const ProductPart> parts,
                           const HamiltonianOp& h, double multiset_cap = 1e6);

/// tr[H rho_beta] at the entropy-matched beta: the N -> inf limit that
/// finite_n_min_energy converges to.
double asymptotic_min_energy(const HamiltonianOp& h, double target_entropy);

/// Everything the coarse-grained measurement says about a state's work
/// content, bundled for serialization.
struct ErgotropyReport {
  double W = 0.0;          // ergotropy
  double W_inf = 0.0;      // asymptotic ergotropy
  double W_B = 0.0;        // Boltzmann ergotropy
  double W_B_inf = 0.0;    // Boltzmann ergotropy, large-N
  double W_obs = 0.0;      // observational ergotropy
  double W_obs_inf = 0.0;  // observational ergotropy, large-N
  double S_Sh = 0.0;
  double S_B = 0.0;
  double S_C = 0.0;
  double S_vN = 0.0;
  BetaSolution beta_B;
  BetaSolution beta_obs;
};

ErgotropyReport ergotropy_report(const DensityMatrix& rho, const HamiltonianOp& h,
                                 const CoarseGraining& cg);

}  // namespace ergoscope
