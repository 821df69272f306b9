#include "ergoscope/extraction_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ergoscope {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) {
    std::ostringstream msg;
    msg << who << ": dimension mismatch, " << a << " vs " << b;
    throw std::invalid_argument(msg.str());
  }
}

int sample_outcome(const RVector& probs, SeededRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_reachable = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_reachable = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last_reachable;
  }
  // u fell into the roundoff sliver past the cumulative sum.
  return last_reachable;
}

}  // namespace

CMatrix block_haar_unitary(const CoarseGraining& cg, SeededRng& rng) {
  CMatrix u = CMatrix::Zero(cg.dim(), cg.dim());
  for (int i = 0; i < cg.outcome_count(); ++i) {
    const CMatrix& b = cg.isometry(i);
    u.noalias() += b * haar_unitary(b.cols(), rng) * b.adjoint();
  }
  return u;
}

CMatrix optimal_unitary_for(const DensityMatrix& sigma, const HamiltonianOp& h) {
  require_same_dim(sigma.dim(), h.dim(), "optimal_unitary_for");
  const Spectrum sigma_spec = eigh(sigma.matrix());  // ascending
  const CMatrix& energy_basis = h.spectrum().eigenvectors;
  // Descending populations onto ascending energies. The sort is stable with
  // respect to the fixed eigh order, so within a degenerate population block
  // vectors keep their order (the three-level doublet maps by the plain
  // 0 <-> 2 swap rather than a 3-cycle).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(sigma.dim()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return sigma_spec.eigenvalues[a] > sigma_spec.eigenvalues[b];
  });
  CMatrix v_desc(sigma.dim(), sigma.dim());
  for (Eigen::Index j = 0; j < sigma.dim(); ++j) {
    v_desc.col(j) = sigma_spec.eigenvectors.col(order[static_cast<std::size_t>(j)]);
  }
  return energy_basis * v_desc.adjoint();
}

namespace {

// Shared plumbing for the Stage-1 fast path and the free function: the
// projected state lives in block i, so only that block's Haar factor acts.
struct Stage1Context {
  double initial_energy;
  RVector probs;
  std::vector<CMatrix> block_states;    // B_i^dag rho B_i / p_i (V_i x V_i)
  std::vector<CMatrix> rotated_h;       // B_i^dag U(i)^dag H U(i) B_i
  std::vector<bool> reachable;          // p_i > 0

  Stage1Context(const DensityMatrix& rho, const HamiltonianOp& h,
                const CoarseGraining& cg) {
    initial_energy = mean_energy(rho, h);
    MeasurementStats stats = measure_probs(rho, cg);
    probs = std::move(stats.probs);
    block_states.resize(cg.outcome_count());
    rotated_h.resize(cg.outcome_count());
    reachable.assign(cg.outcome_count(), false);
    for (int i = 0; i < cg.outcome_count(); ++i) {
      if (probs[i] <= 0.0) continue;
      reachable[i] = true;
      const CMatrix& b = cg.isometry(i);
      block_states[i] = (b.adjoint() * rho.matrix() * b) / probs[i];
      const CMatrix u_i = optimal_unitary_for(cg.macrostate_mixture(i), h);
      rotated_h[i] = b.adjoint() * u_i.adjoint() * h.matrix() * u_i * b;
    }
  }

  WorkSample shot(SeededRng& rng, long shot_index) const {
    const int i = sample_outcome(probs, rng);
    const CMatrix tilde_u = haar_unitary(block_states[i].rows(), rng);
    const double final_energy =
        (rotated_h[i] * (tilde_u * block_states[i] * tilde_u.adjoint()))
            .trace()
            .real();
    return WorkSample{i, initial_energy - final_energy, shot_index};
  }
};

struct Stage2Context {
  double initial_energy;
  CMatrix rho;
  CMatrix rotated_h;  // U_opt^dag H U_opt
  const CoarseGraining* cg;

  Stage2Context(const DensityMatrix& rho_in, const HamiltonianOp& h,
                const CoarseGraining& cg_in)
      : rho(rho_in.matrix()), cg(&cg_in) {
    initial_energy = mean_energy(rho_in, h);
    const MeasurementStats stats = measure_probs(rho_in, cg_in);
    const CMatrix u_opt =
        optimal_unitary_for(coarse_grained_state(stats, cg_in), h);
    rotated_h = u_opt.adjoint() * h.matrix() * u_opt;
  }

  WorkSample shot(SeededRng& rng, long shot_index) const {
    const CMatrix r = block_haar_unitary(*cg, rng);
    const double final_energy =
        (rotated_h * (r * rho * r.adjoint())).trace().real();
    return WorkSample{std::nullopt, initial_energy - final_energy, shot_index};
  }
};

}  // namespace

WorkSample stage1_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                       const CoarseGraining& cg, SeededRng& rng,
                       long shot_index) {
  return Stage1Context(rho, h, cg).shot(rng, shot_index);
}

WorkSample stage2_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                       const CoarseGraining& cg, SeededRng& rng,
                       long shot_index) {
  return Stage2Context(rho, h, cg).shot(rng, shot_index);
}

WorkSample blind_shot(const DensityMatrix& rho, const HamiltonianOp& h,
                      const CoarseGraining& cg, const CMatrix& guess_unitary,
                      long shot_index) {
  require_same_dim(rho.dim(), h.dim(), "blind_shot");
  require_same_dim(rho.dim(), cg.dim(), "blind_shot");
  require_same_dim(rho.dim(), guess_unitary.rows(), "blind_shot");
  if (guess_unitary.rows() != guess_unitary.cols()) {
    throw std::invalid_argument("blind_shot: guess unitary must be square");
  }
  const double final_energy =
      (guess_unitary.adjoint() * h.matrix() * guess_unitary)
          .cwiseProduct(rho.matrix().transpose())
          .sum()
          .real();
  return WorkSample{std::nullopt, mean_energy(rho, h) - final_energy, shot_index};
}

ShotFn make_stage1_shot_fn(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg) {
  auto ctx = std::make_shared<Stage1Context>(rho, h, cg);
  return [ctx](SeededRng& rng, long shot_index) {
    return ctx->shot(rng, shot_index);
  };
}

ShotFn make_stage2_shot_fn(const DensityMatrix& rho, const HamiltonianOp& h,
                           const CoarseGraining& cg) {
  auto ctx = std::make_shared<Stage2Context>(rho, h, cg);
  return [ctx](SeededRng& rng, long shot_index) {
    return ctx->shot(rng, shot_index);
  };
}

McEstimate mc_estimate(const ShotFn& shot_fn, long shots, std::uint64_t seed,
                       int workers, std::vector<WorkSample>* log) {
  if (shots < 2) {
    throw std::invalid_argument("mc_estimate: need at least 2 shots");
  }
  if (workers < 1) {
    throw std::invalid_argument("mc_estimate: need at least 1 worker");
  }
  workers = static_cast<int>(std::min<long>(workers, shots));
  if (log) log->resize(static_cast<std::size_t>(shots));

  std::vector<double> sums(workers, 0.0), sq_sums(workers, 0.0);
  std::vector<std::string> errors(workers);
  auto run_range = [&](int w, long lo, long hi) {
    try {
      SeededRng rng(seed, static_cast<std::uint64_t>(w));
      double sum = 0.0, sq = 0.0;
      for (long idx = lo; idx < hi; ++idx) {
        const WorkSample sample = shot_fn(rng, idx);
        sum += sample.work;
        sq += sample.work * sample.work;
        if (log) (*log)[static_cast<std::size_t>(idx)] = sample;
      }
      sums[w] = sum;
      sq_sums[w] = sq;
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };

  if (workers == 1) {
    run_range(0, 0, shots);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long chunk = shots / workers;
    const long rem = shots % workers;
    long lo = 0;
    for (int w = 0; w < workers; ++w) {
      const long hi = lo + chunk + (w < rem ? 1 : 0);
      pool.emplace_back(run_range, w, lo, hi);
      lo = hi;
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (!err.empty()) throw std::runtime_error("mc_estimate worker: " + err);
  }

  // Reduce in worker order.
  double sum = 0.0, sq = 0.0;
  for (int w = 0; w < workers; ++w) {
    sum += sums[w];
    sq += sq_sums[w];
  }
  const double n = static_cast<double>(shots);
  const double mean = sum / n;
  const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
  return McEstimate{mean, std::sqrt(var / n), shots, seed, workers};
}

DensityMatrix haar_average_state(const DensityMatrix& rho,
                                 const CoarseGraining& cg, long shots,
                                 std::uint64_t seed) {
  if (shots < 1) {
    throw std::invalid_argument("haar_average_state: need at least 1 shot");
  }
  require_same_dim(rho.dim(), cg.dim(), "haar_average_state");
  SeededRng rng(seed);
  CMatrix acc = CMatrix::Zero(rho.dim(), rho.dim());
  for (long s = 0; s < shots; ++s) {
    const CMatrix r = block_haar_unitary(cg, rng);
    acc.noalias() += r * rho.matrix() * r.adjoint();
  }
  acc /= static_cast<double>(shots);
  return DensityMatrix::unchecked(std::move(acc));
}

double verify_haar_average(const DensityMatrix& rho, const CoarseGraining& cg,
                           long shots, std::uint64_t seed) {
  const DensityMatrix mean = haar_average_state(rho, cg, shots, seed);
  const DensityMatrix reference =
      coarse_grained_state(measure_probs(rho, cg), cg);
  return trace_distance(mean, reference);
}

}  // namespace ergoscope
