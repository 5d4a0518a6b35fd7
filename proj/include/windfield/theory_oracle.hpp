#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "windfield/types.hpp"

namespace windfield::theory {

/// The generalization-bound analysis lives on the fixed domain [0, 2pi]^2
/// with fields f(x) = (1/2pi) sum_w fhat(w) e^{i w.x} over an integer
/// support, independent of the production rescaled domain. Values may be
/// complex; nothing here assumes conjugate symmetry.
struct BandlimitedField {
  std::vector<LatticePoint> support;
  std::vector<Vec2c> coeffs;

  void validate() const;
  Vec2c eval(const Vec2& x) const;
};

/// What the bound needs to know about a field: coefficient norms per
/// support point, the mean squared field value, and the noise variance.
struct SpectralProfile {
  std::vector<LatticePoint> support;
  std::vector<double> norms;      // |fhat(w)|, at least one positive
  double e_f_sq = 0.0;            // E |f(x)|^2 over the domain
  double noise_variance = 0.0;    // sigma^2

  void validate() const;
};

/// Sampling probabilities over the profile's support. Zero-norm points are
/// assigned probability zero and listed in zero_norm_points; all other
/// entries are strictly positive.
struct DensityOnSupport {
  std::vector<double> probabilities;
  std::vector<std::size_t> zero_norm_points;
};

struct BoundParams {
  std::size_t feature_count = 1;  // K
  double lambda = 0.0;
  double c_bar = 0.0;             // operator-moment constant

  void validate() const;
};

/// The density minimizing the generalization bound: probabilities
/// proportional to the coefficient norms.
DensityOnSupport optimal_density(const SpectralProfile& profile);

/// The bound itself:
///   (1 + lambda c_bar) / ((2pi)^2 K) * sqrt(E[|fhat|^4 / rho^4])
///     + sigma^2 - E|f|^2 / K
/// with the expectation under rho over the support. Density entries must be
/// strictly positive wherever the norm is positive.
double bound_value(const SpectralProfile& profile,
                   const DensityOnSupport& density, const BoundParams& params);

/// Scale-invariant objective whose minimizers are the optimal densities:
/// (sum |fhat|^4 / p^3) * (sum p)^3 over strictly positive weights p.
double bound_objective(const std::vector<double>& norms,
                       const std::vector<double>& p);

/// Exhaustive minimization of bound_objective over the probability simplex
/// discretized in steps of grid_resolution (which must divide 1). Supports
/// of size up to 6. Ties resolve to the lexicographically first grid point.
DensityOnSupport brute_force_density_argmin(const SpectralProfile& profile,
                                            double grid_resolution);

/// c_bar for the divergence operator given the density's degree-4 moment
/// bound C: the operator's squared symbol (w1^2 + w2^2)^2 has absolute
/// coefficient sum 4, so c_bar = (2pi)^2 * 4 * C.
double divergence_c_bar(double moment_bound);

struct UnbiasednessReport {
  double max_standardized_deviation = 0.0;
  std::size_t draws = 0;
  /// Per test point, the maximum standardized deviation over the four real
  /// dimensions (Re/Im of both components).
  std::vector<double> per_point;
};

/// Monte-Carlo check that the randomized estimator
///   sum_{k=1..K} fhat(w_k) / (2pi K rho(w_k)) e^{i w_k . x}
/// with w_k iid from rho is an unbiased estimate of f(x). Each of
/// draw_count draws samples K frequencies; deviations of the empirical mean
/// from f(x) are standardized by the sample standard error per real
/// dimension (0/0 counts as 0).
UnbiasednessReport unbiasedness_check(const BandlimitedField& field,
                                      const DensityOnSupport& density,
                                      std::size_t K, std::size_t draw_count,
                                      const std::vector<Vec2>& test_points,
                                      std::uint64_t seed);

}  // namespace windfield::theory
