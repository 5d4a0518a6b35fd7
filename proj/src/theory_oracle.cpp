#include "windfield/theory_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "windfield/errors.hpp"
#include "windfield/rng.hpp"

namespace windfield::theory {
namespace {

constexpr double kTwoPi = 6.283185307179586;

void check_unique_support(const std::vector<LatticePoint>& support) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      if (support[i] == support[j]) {
        throw ConfigError("duplicate support point");
      }
    }
  }
}

void check_density_shape(const DensityOnSupport& density, std::size_t size) {
  if (density.probabilities.size() != size) {
    throw ConfigError("density length does not match support");
  }
  double sum = 0.0;
  for (double p : density.probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ConfigError("density entries must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("density must sum to one");
  }
}

}  // namespace

void BandlimitedField::validate() const {
  if (support.size() != coeffs.size()) {
    throw ConfigError("field needs one coefficient pair per support point");
  }
  if (support.empty()) throw ConfigError("field support is empty");
  check_unique_support(support);
  for (const auto& c : coeffs) {
    if (!c.allFinite()) throw ConfigError("non-finite field coefficient");
  }
}

Vec2c BandlimitedField::eval(const Vec2& x) const {
  Vec2c sum = Vec2c::Zero();
  for (std::size_t s = 0; s < support.size(); ++s) {
    const double phase = support[s].m1 * x.x() + support[s].m2 * x.y();
    sum += coeffs[s] * std::polar(1.0, phase);
  }
  return sum / kTwoPi;
}

void SpectralProfile::validate() const {
  if (support.size() != norms.size()) {
    throw ConfigError("profile needs one norm per support point");
  }
  if (support.empty()) throw ConfigError("profile support is empty");
  check_unique_support(support);
  bool any_positive = false;
  for (double n : norms) {
    if (!(n >= 0.0) || !std::isfinite(n)) {
      throw ConfigError("coefficient norms must be finite and non-negative");
    }
    any_positive = any_positive || n > 0.0;
  }
  if (!any_positive) {
    throw DataError("profile has no positive coefficient norm");
  }
  if (!(e_f_sq >= 0.0) || !std::isfinite(e_f_sq) || !(noise_variance >= 0.0) ||
      !std::isfinite(noise_variance)) {
    throw ConfigError("profile moments must be finite and non-negative");
  }
}

void BoundParams::validate() const {
  if (feature_count < 1) throw ConfigError("feature count must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda) || !(c_bar >= 0.0) ||
      !std::isfinite(c_bar)) {
    throw ConfigError("bound parameters must be finite and non-negative");
  }
}

DensityOnSupport optimal_density(const SpectralProfile& profile) {
  profile.validate();
  double total = 0.0;
  for (double n : profile.norms) total += n;
  DensityOnSupport density;
  density.probabilities.reserve(profile.norms.size());
  for (std::size_t i = 0; i < profile.norms.size(); ++i) {
    density.probabilities.push_back(profile.norms[i] / total);
    if (profile.norms[i] == 0.0) density.zero_norm_points.push_back(i);
  }
  return density;
}

double bound_value(const SpectralProfile& profile,
                   const DensityOnSupport& density,
                   const BoundParams& params) {
  profile.validate();
  params.validate();
  check_density_shape(density, profile.support.size());
  double fourth_moment = 0.0;  // E[|fhat|^4 / rho^4] = sum |fhat|^4 / rho^3
  for (std::size_t i = 0; i < profile.norms.size(); ++i) {
    const double n = profile.norms[i];
    if (n == 0.0) continue;
    const double p = density.probabilities[i];
    if (p <= 0.0) {
      throw NumericError("density vanishes at a support point with positive "
                         "norm; the bound diverges");
    }
    const double n2 = n * n;
    fourth_moment += n2 * n2 / (p * p * p);
  }
  const double k = static_cast<double>(params.feature_count);
  return (1.0 + params.lambda * params.c_bar) / (kTwoPi * kTwoPi * k) *
             std::sqrt(fourth_moment) +
         profile.noise_variance - profile.e_f_sq / k;
}

double bound_objective(const std::vector<double>& norms,
                       const std::vector<double>& p) {
  if (norms.size() != p.size() || norms.empty()) {
    throw ConfigError("objective needs matched norms and weights");
  }
  double quartic = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !std::isfinite(p[i])) {
      throw ConfigError("objective weights must be strictly positive");
    }
    const double n2 = norms[i] * norms[i];
    quartic += n2 * n2 / (p[i] * p[i] * p[i]);
    mass += p[i];
  }
  return quartic * mass * mass * mass;
}

DensityOnSupport brute_force_density_argmin(const SpectralProfile& profile,
                                            double grid_resolution) {
  profile.validate();
  const std::size_t k = profile.support.size();
  if (k > 6) {
    throw ConfigError("brute-force search supports at most 6 points");
  }
  if (!(grid_resolution > 0.0) || grid_resolution > 1.0) {
    throw ConfigError("grid resolution must lie in (0, 1]");
  }
  const double units_exact = 1.0 / grid_resolution;
  const long units = std::lround(units_exact);
  if (std::abs(units_exact - static_cast<double>(units)) > 1e-9) {
    throw ConfigError("grid resolution must divide 1");
  }

  std::vector<double> quartics(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double n2 = profile.norms[i] * profile.norms[i];
    quartics[i] = n2 * n2;
  }
  const double inf = std::numeric_limits<double>::infinity();
  // Objective term at weight c units; the simplex constraint makes the
  // (sum p)^3 factor 1, so terms accumulate directly. A positive norm with
  // zero weight means an infinite objective.
  const auto term = [&](std::size_t i, long c) {
    if (quartics[i] == 0.0) return 0.0;
    if (c == 0) return inf;
    const double p = static_cast<double>(c) * grid_resolution;
    return quartics[i] / (p * p * p);
  };

  std::vector<long> counts(k, 0), best(k, 0);
  double best_value = inf;
  // Depth-first enumeration of all compositions of `units` into k parts,
  // lexicographic order, pruning branches whose partial sum already loses.
  const auto search = [&](auto&& self, std::size_t depth, long remaining,
                          double partial) -> void {
    if (partial >= best_value) return;
    if (depth == k - 1) {
      const double value = partial + term(depth, remaining);
      if (value < best_value) {
        counts[depth] = remaining;
        best_value = value;
        best = counts;
      }
      return;
    }
    for (long c = 0; c <= remaining; ++c) {
      counts[depth] = c;
      self(self, depth + 1, remaining - c, partial + term(depth, c));
    }
  };
  search(search, 0, units, 0.0);
  if (!std::isfinite(best_value)) {
    throw NumericError("brute-force search found no finite objective value");
  }

  DensityOnSupport density;
  density.probabilities.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    density.probabilities.push_back(static_cast<double>(best[i]) *
                                    grid_resolution);
    if (profile.norms[i] == 0.0) density.zero_norm_points.push_back(i);
  }
  return density;
}

double divergence_c_bar(double moment_bound) {
  if (!(moment_bound >= 0.0) || !std::isfinite(moment_bound)) {
    throw ConfigError("moment bound must be finite and non-negative");
  }
  return kTwoPi * kTwoPi * 4.0 * moment_bound;
}

UnbiasednessReport unbiasedness_check(const BandlimitedField& field,
                                      const DensityOnSupport& density,
                                      std::size_t K, std::size_t draw_count,
                                      const std::vector<Vec2>& test_points,
                                      std::uint64_t seed) {
  field.validate();
  check_density_shape(density, field.support.size());
  if (K < 1) throw ConfigError("feature count must be >= 1");
  if (draw_count < 2) throw ConfigError("need at least two draws");
  if (test_points.empty()) throw ConfigError("need at least one test point");
  for (std::size_t s = 0; s < field.support.size(); ++s) {
    if (field.coeffs[s].norm() > 0.0 && density.probabilities[s] <= 0.0) {
      throw ConfigError("density vanishes on a support point with nonzero "
                        "coefficient; the estimator cannot be unbiased");
    }
  }

  const std::size_t S = field.support.size();
  const std::size_t T = test_points.size();
  std::vector<double> cumulative(S);
  double acc = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    acc += density.probabilities[s];
    cumulative[s] = acc;
  }
  cumulative.back() = 1.0;

  // contribution[s][t]: the term added to the estimate at test point t when
  // frequency s is drawn once.
  std::vector<std::vector<Vec2c>> contribution(S, std::vector<Vec2c>(T));
  for (std::size_t s = 0; s < S; ++s) {
    const double p = density.probabilities[s];
    if (p <= 0.0) continue;
    const Vec2c scaled =
        field.coeffs[s] / (kTwoPi * static_cast<double>(K) * p);
    for (std::size_t t = 0; t < T; ++t) {
      const double phase = field.support[s].m1 * test_points[t].x() +
                           field.support[s].m2 * test_points[t].y();
      contribution[s][t] = scaled * std::polar(1.0, phase);
    }
  }

  // Running first and second moments of the four real dimensions per point.
  std::vector<std::array<double, 4>> sums(T, {0, 0, 0, 0});
  std::vector<std::array<double, 4>> sq_sums(T, {0, 0, 0, 0});
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vec2c> estimate(T);
  for (std::size_t d = 0; d < draw_count; ++d) {
    for (auto& e : estimate) e.setZero();
    for (std::size_t j = 0; j < K; ++j) {
      const double u = uniform(rng);
      const std::size_t s = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      for (std::size_t t = 0; t < T; ++t) estimate[t] += contribution[s][t];
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::array<double, 4> dims = {
          estimate[t].x().real(), estimate[t].x().imag(),
          estimate[t].y().real(), estimate[t].y().imag()};
      for (std::size_t i = 0; i < 4; ++i) {
        sums[t][i] += dims[i];
        sq_sums[t][i] += dims[i] * dims[i];
      }
    }
  }

  UnbiasednessReport report;
  report.draws = draw_count;
  report.per_point.resize(T, 0.0);
  const double n = static_cast<double>(draw_count);
  for (std::size_t t = 0; t < T; ++t) {
    const Vec2c truth = field.eval(test_points[t]);
    const std::array<double, 4> truth_dims = {
        truth.x().real(), truth.x().imag(), truth.y().real(),
        truth.y().imag()};
    for (std::size_t i = 0; i < 4; ++i) {
      const double mean = sums[t][i] / n;
      const double var =
          std::max(0.0, sq_sums[t][i] / n - mean * mean);
      const double stderr_mean = std::sqrt(var / n);
      const double diff = std::abs(mean - truth_dims[i]);
      double dev;
      if (stderr_mean == 0.0) {
        // Degenerate estimator (e.g. single-frequency support): every draw
        // collapses to the same value, which must match the truth up to
        // accumulated rounding.
        dev = diff <= 1e-12 * (1.0 + std::abs(truth_dims[i]))
                  ? 0.0
                  : std::numeric_limits<double>::infinity();
      } else {
        dev = diff / stderr_mean;
      }
      report.per_point[t] = std::max(report.per_point[t], dev);
    }
    report.max_standardized_deviation =
        std::max(report.max_standardized_deviation, report.per_point[t]);
  }
  return report;
}

}  // namespace windfield::theory
