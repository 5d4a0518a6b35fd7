#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "windfield/spectral_core.hpp"

namespace windfield::rff {

struct RffOptions {
  int frequency_count = 400;     // K, number of adaptive frequencies
  int step_count = 500;          // B, Metropolis steps
  double proposal_sigma = 2.25;  // scale of the rounded Gaussian increments
  double accept_exponent = 1.4;  // gamma in the norm-ratio acceptance rule
  spectral::LossParams loss;
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);
  std::uint64_t seed = 0;
  bool record_history = true;
  int proposal_clamp = 1000000;  // per-component bound on lattice indices

  void validate() const;
};

/// State of one frequency after a chain step.
struct FrequencyDecision {
  LatticePoint m;
  bool accepted = false;
};

/// Post-step lattice snapshots for every chain step, in step order. Each
/// snapshot holds one entry per frequency.
struct ChainHistory {
  int frequency_count = 0;
  std::vector<std::vector<FrequencyDecision>> steps;
  std::size_t clamped_proposals = 0;
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;  // accepted / (steps * frequencies)
  std::map<LatticePoint, std::size_t> visit_counts;  // over all snapshots
  std::size_t clamped_proposals = 0;
};

struct RffResult {
  spectral::SpectralModel model;
  ChainHistory history;
};

/// Independently perturbs every lattice component by a rounded Gaussian
/// increment round(sigma * z). Components are clamped to +-clamp;
/// clamped_count is incremented per clamped component.
spectral::FrequencyLattice propose_step(const spectral::FrequencyLattice& lattice,
                                        double sigma, int clamp,
                                        std::mt19937_64& rng,
                                        std::size_t* clamped_count = nullptr);

/// Norm-ratio acceptance: draw alpha uniform on [0,1) and accept iff
/// (|new| / |old|)^gamma > alpha. A zero-norm incumbent is always replaced.
/// The uniform draw happens on every call so callers advance the stream
/// identically regardless of the branch.
bool accept_frequency(const Vec2c& beta_old, const Vec2c& beta_new,
                      double gamma_exp, std::mt19937_64& rng);

/// Adaptive spectral fit. Frequencies start at the origin; each step
/// proposes a full new lattice, solves the coefficients once for the
/// proposal, and keeps per-frequency winners by the norm-ratio rule
/// (coefficients of accepted frequencies carry over from the proposal
/// solve). The returned model comes from a final full re-solve on the
/// adapted lattice.
RffResult train(const data::TimeSlice& slice, const RffOptions& options);

ChainDiagnostics chain_diagnostics(const ChainHistory& history);

/// CSV with header step,k,m1,m2,accepted; steps 1-based, frequencies
/// 0-based, accepted 0/1.
std::string history_to_csv(const ChainHistory& history);

}  // namespace windfield::rff
