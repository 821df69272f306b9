#include "ergoscope/ergotropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ergoscope {

namespace {

constexpr double kDegeneracyTol = 1e-12;
constexpr double kBetaBracketMax = 1e15;

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) {
    std::ostringstream msg;
    msg << who << ": dimension mismatch, " << a << " vs " << b;
    throw std::invalid_argument(msg.str());
  }
}

// Gibbs populations over shifted energies eps_k = E_k - E_0; immune to
// exp overflow for any beta >= 0.
RVector gibbs_populations(const RVector& energies, double beta) {
  const Eigen::Index d = energies.size();
  RVector p(d);
  if (beta == 0.0) {
    p.setConstant(1.0 / static_cast<double>(d));
    return p;
  }
  const double e0 = energies[0];
  if (std::isinf(beta)) {
    const double gtol = kDegeneracyTol * std::max(1.0, std::abs(e0));
    double g = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      p[k] = (energies[k] - e0 <= gtol) ? 1.0 : 0.0;
      g += p[k];
    }
    p /= g;
    return p;
  }
  double z = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    p[k] = std::exp(-beta * (energies[k] - e0));
    z += p[k];
  }
  p /= z;
  return p;
}

double entropy_of(const RVector& p) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 1e-300) s -= p[k] * std::log(p[k]);
  }
  return s;
}

void check_beta(double beta, const char* who) {
  if (std::isnan(beta) || beta < 0.0) {
    std::ostringstream msg;
    msg << who << ": beta must lie in [0, +inf], got " << beta;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

DensityMatrix passive_state(const DensityMatrix& sigma, const HamiltonianOp& h) {
  require_same_dim(sigma.dim(), h.dim(), "passive_state");
  RVector populations = sigma.eigenvalues();  // ascending
  std::reverse(populations.begin(), populations.end());
  const CMatrix& energy_basis = h.spectrum().eigenvectors;
  CMatrix pi = energy_basis * populations.asDiagonal() * energy_basis.adjoint();
  return DensityMatrix::unchecked(std::move(pi));
}

double ergotropy(const DensityMatrix& rho, const HamiltonianOp& h) {
  require_same_dim(rho.dim(), h.dim(), "ergotropy");
  RVector populations = rho.eigenvalues();
  std::reverse(populations.begin(), populations.end());
  // tr[H pi] without forming pi: descending populations dot ascending levels.
  const double passive_energy = populations.dot(h.spectrum().eigenvalues);
  return mean_energy(rho, h) - passive_energy;
}

DensityMatrix thermal_state(const HamiltonianOp& h, double beta) {
  check_beta(beta, "thermal_state");
  const Spectrum& spec = h.spectrum();
  const RVector p = gibbs_populations(spec.eigenvalues, beta);
  CMatrix rho = spec.eigenvectors * p.asDiagonal() * spec.eigenvectors.adjoint();
  return DensityMatrix::unchecked(std::move(rho));
}

double thermal_energy(const HamiltonianOp& h, double beta) {
  check_beta(beta, "thermal_energy");
  return gibbs_populations(h.spectrum().eigenvalues, beta)
      .dot(h.spectrum().eigenvalues);
}

double thermal_entropy(const HamiltonianOp& h, double beta) {
  check_beta(beta, "thermal_entropy");
  return entropy_of(gibbs_populations(h.spectrum().eigenvalues, beta));
}

BetaSolution solve_beta_for_entropy(const HamiltonianOp& h, double target_entropy) {
  const Eigen::Index d = h.dim();
  const double ln_d = std::log(static_cast<double>(d));
  if (std::isnan(target_entropy) || target_entropy < 0.0 ||
      target_entropy > ln_d + 1e-12) {
    std::ostringstream msg;
    msg << "solve_beta_for_entropy: target " << target_entropy
        << " outside [0, ln d = " << ln_d << "]";
    throw std::domain_error(msg.str());
  }

  const RVector& energies = h.spectrum().eigenvalues;
  auto entropy_at = [&](double beta) {
    return entropy_of(gibbs_populations(energies, beta));
  };

  BetaSolution sol;
  sol.target_entropy = target_entropy;
  if (target_entropy >= ln_d) {
    sol.beta = 0.0;
    sol.achieved_entropy = ln_d;
    return sol;
  }

  // Targets at or below ln(ground degeneracy) are reached only in the
  // beta -> inf limit; clamp and flag so callers can tell.
  const double gtol = kDegeneracyTol * std::max(1.0, std::abs(energies[0]));
  Eigen::Index ground_degeneracy = 0;
  for (Eigen::Index k = 0; k < energies.size(); ++k) {
    if (energies[k] - energies[0] <= gtol) ++ground_degeneracy;
  }
  if (target_entropy <=
      std::log(static_cast<double>(ground_degeneracy)) + 1e-12) {
    sol.beta = std::numeric_limits<double>::infinity();
    sol.achieved_entropy = entropy_at(sol.beta);
    sol.clamped = true;
    return sol;
  }

  // Grow the upper bracket geometrically until the entropy drops below the
  // target.
  double lo = 0.0;
  double hi = 1.0;
  int iterations = 0;
  while (entropy_at(hi) > target_entropy) {
    lo = hi;
    hi *= 2.0;
    ++iterations;
    if (hi > kBetaBracketMax) {
      sol.beta = std::numeric_limits<double>::infinity();
      sol.achieved_entropy = entropy_at(sol.beta);
      sol.iterations = iterations;
      sol.clamped = true;
      return sol;
    }
  }

  // Bisection; run the bracket down to near machine width so equal targets
  // give bit-identical betas and nearby targets give nearby betas.
  while (iterations < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (entropy_at(mid) > target_entropy) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  sol.beta = 0.5 * (lo + hi);
  sol.achieved_entropy = entropy_at(sol.beta);
  sol.iterations = iterations;
  return sol;
}

double asymptotic_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h) {
  require_same_dim(rho.dim(), h.dim(), "asymptotic_ergotropy");
  const BetaSolution sol = solve_beta_for_entropy(h, von_neumann_entropy(rho));
  return mean_energy(rho, h) - thermal_energy(h, sol.beta);
}

RVector boltzmann_ergotropy_per_outcome(const DensityMatrix& rho,
                                        const HamiltonianOp& h,
                                        const CoarseGraining& cg) {
  require_same_dim(rho.dim(), h.dim(), "boltzmann_ergotropy");
  require_same_dim(rho.dim(), cg.dim(), "boltzmann_ergotropy");
  const double initial = mean_energy(rho, h);
  const RVector& levels = h.spectrum().eigenvalues;
  RVector w(cg.outcome_count());
  for (int i = 0; i < cg.outcome_count(); ++i) {
    // Passive energy of the flat macrostate P_i/V_i: the V_i lowest levels
    // each weighted 1/V_i.
    const int v = cg.volume(i);
    w[i] = initial - levels.head(v).sum() / static_cast<double>(v);
  }
  return w;
}

double boltzmann_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg) {
  const MeasurementStats stats = measure_probs(rho, cg);
  return stats.probs.dot(boltzmann_ergotropy_per_outcome(rho, h, cg));
}

double boltzmann_ergotropy_asymptotic(const DensityMatrix& rho,
                                      const HamiltonianOp& h,
                                      const CoarseGraining& cg) {
  require_same_dim(rho.dim(), h.dim(), "boltzmann_ergotropy_asymptotic");
  const MeasurementStats stats = measure_probs(rho, cg);
  const BetaSolution sol = solve_beta_for_entropy(h, boltzmann_entropy(stats));
  return mean_energy(rho, h) - thermal_energy(h, sol.beta);
}

double observational_ergotropy(const DensityMatrix& rho, const HamiltonianOp& h,
                               const CoarseGraining& cg) {
  require_same_dim(rho.dim(), h.dim(), "observational_ergotropy");
  const MeasurementStats stats = measure_probs(rho, cg);
  const DensityMatrix rho_cg = coarse_grained_state(stats, cg);
  RVector populations = rho_cg.eigenvalues();
  std::reverse(populations.begin(), populations.end());
  const double passive_energy = populations.dot(h.spectrum().eigenvalues);
  return mean_energy(rho, h) - passive_energy;
}

double observational_ergotropy_asymptotic(const DensityMatrix& rho,
                                          const HamiltonianOp& h,
                                          const CoarseGraining& cg) {
  require_same_dim(rho.dim(), h.dim(), "observational_ergotropy_asymptotic");
  const MeasurementStats stats = measure_probs(rho, cg);
  const BetaSolution sol = solve_beta_for_entropy(h, observational_entropy(stats));
  return mean_energy(rho, h) - thermal_energy(h, sol.beta);
}

double finite_n_min_energy(std::span<const ProductPart> parts,
                           const HamiltonianOp& h, double multiset_cap) {
  if (parts.empty()) {
    throw std::invalid_argument("finite_n_min_energy: no parts given");
  }
  long total_copies = 0;
  for (const auto& part : parts) {
    require_same_dim(part.state.dim(), h.dim(), "finite_n_min_energy");
    if (part.copies < 0) {
      throw std::invalid_argument("finite_n_min_energy: negative copy count");
    }
    total_copies += part.copies;
  }
  if (total_copies < 1) {
    throw std::invalid_argument("finite_n_min_energy: N = sum n_i must be >= 1");
  }
  const double d = static_cast<double>(h.dim());
  if (std::pow(d, static_cast<double>(total_copies)) > multiset_cap) {
    std::ostringstream msg;
    msg << "finite_n_min_energy: multiset size " << d << "^" << total_copies
        << " exceeds cap " << multiset_cap;
    throw std::length_error(msg.str());
  }

  // Nonzero eigenvalues of the product state: products over copies. Zero
  // populations pair with the highest levels and contribute nothing, so they
  // are dropped up front.
  std::vector<double> values{1.0};
  for (const auto& part : parts) {
    if (part.copies == 0) continue;
    const RVector eigs = part.state.eigenvalues();
    std::vector<double> nonzero;
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
      if (eigs[k] > 1e-14) nonzero.push_back(eigs[k]);
    }
    for (long c = 0; c < part.copies; ++c) {
      std::vector<double> next;
      next.reserve(values.size() * nonzero.size());
      for (const double v : values) {
        for (const double e : nonzero) next.push_back(v * e);
      }
      values = std::move(next);
    }
  }
  std::sort(values.begin(), values.end(), std::greater<>());

  // H_N spectrum on the product eigenbasis: sums of single-copy levels.
  // Only the lowest |values| sums enter the passive pairing; pruning each
  // round keeps the working set from overshooting the cap.
  const RVector& levels = h.spectrum().eigenvalues;
  std::vector<double> sums{0.0};
  for (long c = 0; c < total_copies; ++c) {
    std::vector<double> next;
    next.reserve(sums.size() * static_cast<std::size_t>(levels.size()));
    for (const double s : sums) {
      for (Eigen::Index k = 0; k < levels.size(); ++k) next.push_back(s + levels[k]);
    }
    std::sort(next.begin(), next.end());
    if (next.size() > values.size()) next.resize(values.size());
    sums = std::move(next);
  }

  double energy = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) energy += values[k] * sums[k];
  return energy / static_cast<double>(total_copies);
}

double asymptotic_min_energy(const HamiltonianOp& h, double target_entropy) {
  return thermal_energy(h, solve_beta_for_entropy(h, target_entropy).beta);
}

ErgotropyReport ergotropy_report(const DensityMatrix& rho, const HamiltonianOp& h,
                                 const CoarseGraining& cg) {
  ErgotropyReport report;
  const MeasurementStats stats = measure_probs(rho, cg);
  report.S_Sh = shannon_entropy(stats);
  report.S_B = boltzmann_entropy(stats);
  report.S_C = observational_entropy(stats);
  report.S_vN = von_neumann_entropy(rho);

  const double initial = mean_energy(rho, h);
  report.W = ergotropy(rho, h);
  report.W_inf = initial - thermal_energy(h, solve_beta_for_entropy(h, report.S_vN).beta);
  report.W_B = boltzmann_ergotropy(rho, h, cg);
  report.beta_B = solve_beta_for_entropy(h, report.S_B);
  report.W_B_inf = initial - thermal_energy(h, report.beta_B.beta);
  report.W_obs = observational_ergotropy(rho, h, cg);
  report.beta_obs = solve_beta_for_entropy(h, report.S_C);
  report.W_obs_inf = initial - thermal_energy(h, report.beta_obs.beta);
  return report;
}

}  // namespace ergoscope
