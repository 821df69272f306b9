#include "ergoscope/three_level.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ergoscope {

ThreeLevelFixture three_level_fixture(double e0, double e1, double e2) {
  if (!(e0 < e1 && e1 < e2)) {
    throw std::invalid_argument(
        "three_level_fixture: energies must be strictly ascending");
  }
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 0) = e0;
  h(1, 1) = e1;
  h(2, 2) = e2;

  CMatrix p0 = CMatrix::Zero(3, 3);
  p0(0, 0) = 1.0;
  CMatrix p1 = CMatrix::Zero(3, 3);
  p1(1, 1) = 1.0;
  p1(2, 2) = 1.0;

  CVector plus = CVector::Zero(3);
  plus[1] = plus[2] = 1.0 / std::numbers::sqrt2;

  CMatrix rho_d = CMatrix::Zero(3, 3);
  rho_d(0, 0) = 0.125;
  rho_d(1, 1) = 0.875;

  CMatrix swap = CMatrix::Zero(3, 3);
  swap(0, 2) = swap(2, 0) = swap(1, 1) = 1.0;

  ThreeLevelFixture fx{
      HamiltonianOp::from_matrix(std::move(h)),
      CoarseGraining::from_projectors({p0, p1}, {"ground", "excited"}),
      DensityMatrix::pure(CVector::Unit(3, 1)),
      DensityMatrix::pure(CVector::Unit(3, 2)),
      DensityMatrix::pure(plus),
      DensityMatrix::from_matrix(std::move(rho_d)),
      std::move(swap),
      // Boltzmann ergotropies: tr[H rho] minus the flat excited doublet's
      // passive energy (E0+E1)/2, outcome-weighted for rho_D.
      (e1 - e0) / 2.0,
      e2 - (e0 + e1) / 2.0,
      (e2 - e0) / 2.0,
      7.0 * (e1 - e0) / 16.0,
      // p = (0,1) makes the first three observational values coincide with
      // the Boltzmann ones.
      (e1 - e0) / 2.0,
      e2 - (e0 + e1) / 2.0,
      (e2 - e0) / 2.0,
      (7.0 * e1 - 5.0 * e0 - 2.0 * e2) / 16.0,
      // Blind extraction with the 0<->2 swap.
      0.0,
      e2 - e0,
      (e2 - e0) / 2.0,
      (e0 - e2) / 8.0,
  };
  return fx;
}

}  // namespace ergoscope
