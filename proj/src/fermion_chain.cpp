#include "ergoscope/fermion_chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ergoscope {

namespace {

void validate_spec(const ChainSpec& spec) {
  if (spec.sites < 4 || spec.sites % 2 != 0) {
    throw std::invalid_argument("ChainSpec: need an even site count >= 4");
  }
  if (spec.sites > 16) {
    throw std::invalid_argument("ChainSpec: site count too large for dense work");
  }
  if (spec.particles < 0 || spec.particles > spec.sites) {
    throw std::invalid_argument("ChainSpec: particle number outside [0, L]");
  }
}

// Parity of occupied sites strictly between a and b (1-based sites).
int jw_sign(std::uint32_t mask, int a, int b) {
  if (a > b) std::swap(a, b);
  const std::uint32_t between =
      mask & ((1u << (b - 1)) - 1u) & ~((1u << a) - 1u);
  return (std::popcount(between) % 2 == 0) ? 1 : -1;
}

}  // namespace

SectorBasis::SectorBasis(int sites, int particles)
    : sites_(sites), particles_(particles) {
  if (sites < 0 || sites > 20) {
    throw std::invalid_argument("SectorBasis: site count outside [0, 20]");
  }
  if (particles < 0 || particles > sites) {
    throw std::invalid_argument("SectorBasis: particle number outside [0, sites]");
  }
  const std::uint32_t top = 1u << sites;
  index_of_mask_.assign(top, -1);
  for (std::uint32_t m = 0; m < top; ++m) {
    if (std::popcount(m) == particles) {
      index_of_mask_[m] = static_cast<Eigen::Index>(masks_.size());
      masks_.push_back(m);
    }
  }
}

Eigen::Index SectorBasis::index(std::uint32_t mask) const {
  if (mask >= index_of_mask_.size() || index_of_mask_[mask] < 0) {
    throw std::invalid_argument("SectorBasis: mask not in this sector");
  }
  return index_of_mask_[mask];
}

HamiltonianOp build_hamiltonian(const ChainSpec& spec, const SectorBasis& basis,
                                int first_site, int last_site) {
  if (first_site < 1 || last_site > basis.sites() || first_site > last_site) {
    std::ostringstream msg;
    msg << "build_hamiltonian: range [" << first_site << "," << last_site
        << "] outside [1," << basis.sites() << "]";
    throw std::invalid_argument(msg.str());
  }
  const Eigen::Index dim = basis.dim();
  CMatrix h = CMatrix::Zero(dim, dim);

  struct Term {
    int a, b;
    double hop, density;
  };
  std::vector<Term> terms;
  for (int i = first_site; i <= last_site; ++i) {
    if (i + 1 <= last_site) terms.push_back({i, i + 1, -spec.hop, spec.coupling});
    if (i + 2 <= last_site) terms.push_back({i, i + 2, -spec.hop2, spec.coupling2});
  }

  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t m = basis.mask(col);
    double diag = 0.0;
    for (const Term& term : terms) {
      const bool occ_a = m & (1u << (term.a - 1));
      const bool occ_b = m & (1u << (term.b - 1));
      if (occ_a && occ_b) diag += term.density;
      if (occ_a != occ_b) {
        const std::uint32_t flipped =
            m ^ (1u << (term.a - 1)) ^ (1u << (term.b - 1));
        h(basis.index(flipped), col) +=
            term.hop * jw_sign(m, term.a, term.b);
      }
    }
    h(col, col) += diag;
  }
  return HamiltonianOp::from_matrix(std::move(h));
}

SplitHamiltonians split_hamiltonian(const ChainSpec& spec) {
  validate_spec(spec);
  SectorBasis basis(spec.sites, spec.particles);
  const int half = spec.sites / 2;
  HamiltonianOp full = build_hamiltonian(spec, basis, 1, spec.sites);
  HamiltonianOp left = build_hamiltonian(spec, basis, 1, half);
  HamiltonianOp right = build_hamiltonian(spec, basis, half + 1, spec.sites);
  HamiltonianOp interaction = HamiltonianOp::from_matrix(
      full.matrix() - left.matrix() - right.matrix());
  return SplitHamiltonians{std::move(basis), std::move(full), std::move(left),
                           std::move(right), std::move(interaction)};
}

LocalEnergyCoarseGraining local_energy_coarse_graining(
    const ChainSpec& spec, double resolution,
    std::optional<std::pair<double, double>> origins) {
  validate_spec(spec);
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("local_energy_coarse_graining: resolution must be > 0");
  }
  const int half = spec.sites / 2;
  const int n = spec.particles;
  const int k_min = std::max(0, n - half);
  const int k_max = std::min(n, half);

  // Half-chain diagonalizations per local particle count. The right half
  // H^(L/2+1:L) is isomorphic to H^(1:L/2) on its own window.
  struct HalfSector {
    SectorBasis basis;
    Spectrum spectrum;
  };
  std::map<int, HalfSector> half_sectors;
  for (int k = k_min; k <= k_max; ++k) {
    for (const int count : {k, n - k}) {
      if (half_sectors.count(count)) continue;
      SectorBasis b(half, count);
      Spectrum s = build_hamiltonian(spec, b, 1, half).spectrum();
      half_sectors.emplace(count, HalfSector{std::move(b), std::move(s)});
    }
  }

  double origin_left = 0.0, origin_right = 0.0;
  if (origins) {
    origin_left = origins->first;
    origin_right = origins->second;
  } else {
    origin_left = origin_right =
        std::min_element(half_sectors.begin(), half_sectors.end(),
                         [](const auto& a, const auto& b) {
                           return a.second.spectrum.eigenvalues.minCoeff() <
                                  b.second.spectrum.eigenvalues.minCoeff();
                         })
            ->second.spectrum.eigenvalues.minCoeff();
  }

  const SectorBasis full_basis(spec.sites, n);
  const auto bin_of = [resolution](double energy, double origin) {
    return static_cast<long>(std::floor((energy - origin) / resolution + 1e-9));
  };

  // Columns of each joint projector, keyed by the (bin1, bin2) cell label
  // and collected across the k sectors.
  std::map<std::pair<long, long>, std::vector<CVector>> cells;
  for (int k = k_min; k <= k_max; ++k) {
    const HalfSector& lhs = half_sectors.at(k);
    const HalfSector& rhs = half_sectors.at(n - k);
    for (Eigen::Index a = 0; a < lhs.basis.dim(); ++a) {
      const long bin1 = bin_of(lhs.spectrum.eigenvalues[a], origin_left);
      for (Eigen::Index b = 0; b < rhs.basis.dim(); ++b) {
        const long bin2 = bin_of(rhs.spectrum.eigenvalues[b], origin_right);
        // Embed |w_a> (x) |v_b> into the sector basis. Left modes precede
        // right modes in the Jordan-Wigner ordering, so no extra sign.
        CVector column = CVector::Zero(full_basis.dim());
        for (Eigen::Index la = 0; la < lhs.basis.dim(); ++la) {
          const Complex wa = lhs.spectrum.eigenvectors(la, a);
          const std::uint32_t left_mask = lhs.basis.mask(la);
          for (Eigen::Index rb = 0; rb < rhs.basis.dim(); ++rb) {
            const std::uint32_t full_mask =
                left_mask | (rhs.basis.mask(rb) << half);
            column[full_basis.index(full_mask)] =
                wa * rhs.spectrum.eigenvectors(rb, b);
          }
        }
        cells[{bin1, bin2}].push_back(std::move(column));
      }
    }
  }

  std::vector<CMatrix> isometries;
  std::vector<std::string> labels;
  std::vector<std::pair<long, long>> cell_bins;
  isometries.reserve(cells.size());
  for (auto& [bins, columns] : cells) {
    CMatrix iso(full_basis.dim(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      iso.col(static_cast<Eigen::Index>(j)) = columns[j];
    }
    isometries.push_back(std::move(iso));
    std::ostringstream label;
    label << "E1bin" << bins.first << "_E2bin" << bins.second;
    labels.push_back(label.str());
    cell_bins.push_back(bins);
  }

  LocalEnergyCoarseGraining out{
      CoarseGraining::from_isometries(std::move(isometries), std::move(labels)),
      std::move(cell_bins), origin_left, origin_right, resolution};
  return out;
}

double energy_estimate_bound(const SplitHamiltonians& split, double resolution,
                             int partitions) {
  if (partitions < 2) {
    throw std::invalid_argument("energy_estimate_bound: need at least 2 partitions");
  }
  const RVector& eigs = split.interaction.spectrum().eigenvalues;
  const double norm = std::max(std::abs(eigs[0]), std::abs(eigs[eigs.size() - 1]));
  return 2.0 * norm + static_cast<double>(partitions) * resolution;
}

PureState scenario_initial_state(const ChainSpec& spec, const SectorBasis& basis) {
  const int half = spec.sites / 2;
  if (spec.particles > half) {
    throw std::invalid_argument(
        "scenario_initial_state: the product state needs particles <= L/2");
  }
  std::uint32_t mask = 0;
  for (int j = 0; j < spec.particles; ++j) mask |= 1u << (half + j);
  return PureState::basis_vector(basis.dim(), basis.index(mask));
}

ScenarioResult figure2_scenario(const ScenarioConfig& config) {
  validate_spec(config.chain);
  if (config.t_steps < 1) {
    throw std::invalid_argument("figure2_scenario: t_steps must be >= 1");
  }
  const SplitHamiltonians split = split_hamiltonian(config.chain);
  const HamiltonianOp& h = split.full;
  const RVector& levels = h.spectrum().eigenvalues;

  double delta_e = 0.0;
  switch (config.de_rule.kind) {
    case DeltaERule::Kind::GlobalGap:
      delta_e = 0.5 * (levels[1] - levels[0]);
      break;
    case DeltaERule::Kind::LocalGap: {
      // Pooled half-chain sector eigenvalues, each local particle count once.
      const int half = config.chain.sites / 2;
      const int n = config.chain.particles;
      std::set<int> counts;
      for (int k = std::max(0, n - half); k <= std::min(n, half); ++k) {
        counts.insert(k);
        counts.insert(n - k);
      }
      std::vector<double> pooled;
      for (const int count : counts) {
        SectorBasis b(half, count);
        const RVector e =
            build_hamiltonian(config.chain, b, 1, half).spectrum().eigenvalues;
        pooled.insert(pooled.end(), e.begin(), e.end());
      }
      std::sort(pooled.begin(), pooled.end());
      delta_e = 0.5 * (pooled[1] - pooled[0]);
      break;
    }
    case DeltaERule::Kind::Explicit:
      delta_e = config.de_rule.value;
      break;
  }
  if (!(delta_e > 0.0)) {
    throw std::runtime_error("figure2_scenario: resolved dE is not positive");
  }

  const LocalEnergyCoarseGraining local =
      local_energy_coarse_graining(config.chain, delta_e);
  const CoarseGraining global_cg =
      energy_coarse_graining(h, delta_e, levels[0]);
  const double halfwidth = energy_estimate_bound(split, delta_e);

  // tr[H P_i] per cell, once.
  RVector cell_energy(local.cg.outcome_count());
  for (int i = 0; i < local.cg.outcome_count(); ++i) {
    const CMatrix& b = local.cg.isometry(i);
    cell_energy[i] = (b.adjoint() * (h.matrix() * b)).trace().real();
  }

  const PureState psi0 = scenario_initial_state(config.chain, split.basis);
  const CVector coeffs0 = h.spectrum().eigenvectors.adjoint() * psi0.amplitudes();

  ScenarioResult result;
  result.meta.h_int_norm =
      std::max(std::abs(split.interaction.spectrum().eigenvalues.minCoeff()),
               std::abs(split.interaction.spectrum().eigenvalues.maxCoeff()));
  result.meta.delta_e = delta_e;
  result.meta.e0 = levels[0];
  result.meta.e1 = levels[1];
  result.meta.sector_dim = split.basis.dim();
  result.meta.outcome_cells = local.cg.outcome_count();
  {
    std::ostringstream desc;
    desc << "left half empty, right-half sites " << config.chain.sites / 2 + 1
         << ".." << config.chain.sites / 2 + config.chain.particles
         << " occupied";
    result.meta.initial_state = desc.str();
  }

  result.rows.reserve(static_cast<std::size_t>(config.t_steps));
  for (int step = 0; step < config.t_steps; ++step) {
    const double t = (config.t_steps == 1)
                         ? 0.0
                         : config.t_max * static_cast<double>(step) /
                               static_cast<double>(config.t_steps - 1);
    CVector coeffs = coeffs0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      coeffs[k] *= std::exp(Complex(0.0, -levels[k] * t));
    }
    const PureState psi =
        PureState::from_amplitudes(h.spectrum().eigenvectors * coeffs);

    ScenarioRow row;
    row.t = t;
    row.energy_true = mean_energy(psi, h);
    const MeasurementStats stats = measure_probs(psi, local.cg);
    row.s_shannon = shannon_entropy(stats);
    row.s_boltzmann = boltzmann_entropy(stats);
    row.s_obs = observational_entropy(stats);

    double energy_cg = 0.0;
    for (int i = 0; i < local.cg.outcome_count(); ++i) {
      energy_cg += stats.probs[i] / static_cast<double>(local.cg.volume(i)) *
                   cell_energy[i];
    }
    row.energy_cg = energy_cg;
    row.bound_halfwidth = halfwidth;

    const BetaSolution beta = solve_beta_for_entropy(h, row.s_obs);
    const double thermal = thermal_energy(h, beta.beta);
    row.w_obs_inf_true = row.energy_true - thermal;
    row.w_obs_inf_cg = row.energy_cg - thermal;
    row.w_band_lo = row.w_obs_inf_cg - halfwidth;
    row.w_band_hi = row.w_obs_inf_cg + halfwidth;

    row.s_th_global = observational_entropy(measure_probs(psi, global_cg));
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace ergoscope
