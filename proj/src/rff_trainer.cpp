#include "windfield/rff_trainer.hpp"

#include <cmath>
#include <cstdio>

#include "windfield/errors.hpp"
#include "windfield/rng.hpp"

namespace windfield::rff {

void RffOptions::validate() const {
  loss.validate();
  if (frequency_count < 1) {
    throw ConfigError("frequency count must be positive");
  }
  if (step_count < 0) {
    throw ConfigError("step count must be non-negative");
  }
  if (!(proposal_sigma >= 0.0) || !std::isfinite(proposal_sigma)) {
    throw ConfigError("proposal sigma must be finite and non-negative");
  }
  if (!(accept_exponent > 0.0) || !std::isfinite(accept_exponent)) {
    throw ConfigError("acceptance exponent must be finite and positive");
  }
  if (proposal_clamp < 1) {
    throw ConfigError("proposal clamp must be positive");
  }
}

spectral::FrequencyLattice propose_step(const spectral::FrequencyLattice& lattice,
                                        double sigma, int clamp,
                                        std::mt19937_64& rng,
                                        std::size_t* clamped_count) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  spectral::FrequencyLattice proposal;
  proposal.reserve(lattice.size());
  for (const auto& m : lattice) {
    long n1 = m.m1 + std::lround(sigma * gauss(rng));
    long n2 = m.m2 + std::lround(sigma * gauss(rng));
    for (long* n : {&n1, &n2}) {
      if (*n > clamp) {
        *n = clamp;
        if (clamped_count) ++*clamped_count;
      } else if (*n < -clamp) {
        *n = -clamp;
        if (clamped_count) ++*clamped_count;
      }
    }
    proposal.push_back(
        LatticePoint{static_cast<int>(n1), static_cast<int>(n2)});
  }
  return proposal;
}

bool accept_frequency(const Vec2c& beta_old, const Vec2c& beta_new,
                      double gamma_exp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double alpha = uniform(rng);
  const double old_norm = beta_old.norm();
  if (old_norm == 0.0) return true;
  const double ratio = beta_new.norm() / old_norm;
  return std::pow(ratio, gamma_exp) > alpha;
}

RffResult train(const data::TimeSlice& slice, const RffOptions& options) {
  options.validate();
  const auto unit = spectral::unit_positions(slice, options.tau,
                                             options.origin);
  const std::size_t K = static_cast<std::size_t>(options.frequency_count);
  auto rng = make_rng(options.seed);

  spectral::FrequencyLattice lattice(K, LatticePoint{0, 0});
  spectral::Coefficients beta =
      solve_coefficients(unit, slice.velocities, lattice, options.loss);

  ChainHistory history;
  history.frequency_count = options.frequency_count;
  if (options.record_history) {
    history.steps.reserve(static_cast<std::size_t>(options.step_count));
  }

  for (int step = 0; step < options.step_count; ++step) {
    const auto proposal =
        propose_step(lattice, options.proposal_sigma, options.proposal_clamp,
                     rng, &history.clamped_proposals);
    const spectral::Coefficients beta_prop =
        solve_coefficients(unit, slice.velocities, proposal, options.loss);
    std::vector<FrequencyDecision> snapshot;
    if (options.record_history) snapshot.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const bool accepted = accept_frequency(beta[k], beta_prop[k],
                                             options.accept_exponent, rng);
      if (accepted) {
        lattice[k] = proposal[k];
        beta[k] = beta_prop[k];
      }
      if (options.record_history) {
        snapshot[k] = FrequencyDecision{lattice[k], accepted};
      }
    }
    if (options.record_history) history.steps.push_back(std::move(snapshot));
  }

  beta = solve_coefficients(unit, slice.velocities, lattice, options.loss);
  return RffResult{
      spectral::SpectralModel(std::move(lattice), std::move(beta), options.tau,
                              options.origin),
      std::move(history)};
}

ChainDiagnostics chain_diagnostics(const ChainHistory& history) {
  ChainDiagnostics diag;
  diag.clamped_proposals = history.clamped_proposals;
  std::size_t accepted = 0;
  std::size_t total = 0;
  for (const auto& snapshot : history.steps) {
    for (const auto& decision : snapshot) {
      ++total;
      accepted += decision.accepted ? 1u : 0u;
      ++diag.visit_counts[decision.m];
    }
  }
  diag.acceptance_rate =
      total == 0 ? 0.0 : static_cast<double>(accepted) / total;
  return diag;
}

std::string history_to_csv(const ChainHistory& history) {
  std::string out = "step,k,m1,m2,accepted\n";
  char buf[96];
  for (std::size_t step = 0; step < history.steps.size(); ++step) {
    const auto& snapshot = history.steps[step];
    for (std::size_t k = 0; k < snapshot.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%d,%d\n", step + 1, k,
                    snapshot[k].m.m1, snapshot[k].m.m2,
                    snapshot[k].accepted ? 1 : 0);
      out += buf;
    }
  }
  return out;
}

}  // namespace windfield::rff
