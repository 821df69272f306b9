#pragma once

#include "ergoscope/extraction_protocol.hpp"

namespace ergoscope {

/// Three-level system with the two-outcome coarse-graining that groups the
/// excited states: C = {|0><0|, |1><1| + |2><2|}. Carries the four source
/// states, the swap extraction unitary |0><2| + |2><0| + |1><1|, and the
/// closed-form work values they produce, parameterized by the level
/// energies.
struct ThreeLevelFixture {
  HamiltonianOp h;
  CoarseGraining cg;
  DensityMatrix rho_a;  // |1><1|
  DensityMatrix rho_b;  // |2><2|
  DensityMatrix rho_c;  // (|1>+|2>)(<1|+<2|)/2
  DensityMatrix rho_d;  // diag(1/8, 7/8, 0)
  CMatrix swap_unitary;

  // Outcome-conditioned (Boltzmann) ergotropies.
  double w_b_a, w_b_b, w_b_c, w_b_d;
  // Unconditional (observational) ergotropies.
  double w_obs_a, w_obs_b, w_obs_c, w_obs_d;
  // Blind direct extraction with the swap unitary.
  double blind_a, blind_b, blind_c, blind_d;
};

/// Throws std::invalid_argument unless e0 < e1 < e2.
ThreeLevelFixture three_level_fixture(double e0 = 0.0, double e1 = 1.0,
                                      double e2 = 2.0);

}  // namespace ergoscope
