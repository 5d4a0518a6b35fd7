#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::eval {

/// Fits an interpolant to one slice. Trainers must be deterministic in the
/// slice content; randomized models derive their stream from the slice time
/// and a master seed captured at construction.
using Trainer =
    std::function<std::unique_ptr<Interpolator>(const data::TimeSlice&)>;

Trainer make_zero_trainer();

/// Station-to-fold map. Folds partition stations, sizes differing by at
/// most one.
struct FoldAssignment {
  std::map<std::string, int> fold_of;
  int fold_count = 0;
};

/// Shuffles the sorted station ids with the seeded generator and deals them
/// round-robin, so the assignment is invariant to input order.
FoldAssignment make_folds(const std::vector<std::string>& station_ids,
                          int fold_count, std::uint64_t seed);

struct SliceScore {
  std::int64_t time = 0;
  double q = 0.0;
  std::size_t stations = 0;
};

/// Cross-validated score of one slice: each fold is held out in turn, the
/// trainer fits the remaining stations, and squared prediction errors on the
/// held-out stations are summed. The score is that sum divided by the
/// number of observations in the slice.
SliceScore slice_quality(const Trainer& trainer, const data::TimeSlice& slice,
                         const FoldAssignment& folds);

/// Scores aggregated over the slice sample. Variances use the 1/n
/// convention; the half-width is two standard errors of the mean score.
struct QualityReport {
  double q_tilde = 0.0;
  double var_q_t = 0.0;      // population variance of per-slice scores
  double var_q_tilde = 0.0;  // var_q_t / n, variance of the mean
  double q_zero = 0.0;       // mean score of the zero reference
  double e_tilde = 0.0;      // q_tilde / q_zero
  double ci_half_width = 0.0;
  std::size_t samples = 0;
};

/// Aggregates matched per-slice scores of a model and of the zero
/// reference over the same slices in the same order.
QualityReport aggregate(const std::vector<SliceScore>& scores,
                        const std::vector<SliceScore>& zero_scores);

struct DifferenceReport {
  double delta_q = 0.0;
  double var_delta_t = 0.0;
  double var_delta = 0.0;
  double ci_half_width = 0.0;
  std::size_t samples = 0;
};

/// Per-slice paired difference f - g over matched slices; same variance
/// conventions as aggregate.
DifferenceReport paired_difference(const std::vector<SliceScore>& f,
                                   const std::vector<SliceScore>& g);

struct GridCandidate {
  std::string label;
  Trainer trainer;
};

struct GridRow {
  std::string label;
  QualityReport report;
};

struct GridResult {
  std::vector<GridRow> rows;      // in candidate order
  std::size_t best_index = 0;     // smallest e_tilde, ties to the first
  std::vector<std::vector<SliceScore>> scores;  // per candidate
  std::vector<SliceScore> zero_scores;
};

/// Scores every candidate over the same slices with shared fold
/// assignments (derived per slice time from the master seed), so rows are
/// directly comparable. Slice scoring runs on up to `jobs` threads.
GridResult grid_search(const std::vector<GridCandidate>& candidates,
                       const std::vector<data::TimeSlice>& slices,
                       int fold_count, std::uint64_t master_seed, int jobs);

/// Means of seeded with-replacement subsamples, for null-distribution and
/// stability checks of aggregated scores.
std::vector<double> bootstrap_distribution(const std::vector<double>& values,
                                           std::size_t resamples,
                                           std::size_t subsample_size,
                                           std::uint64_t seed);

/// Normalized autocovariance r_0..r_max_lag (r_0 = 1). Returns an empty
/// vector when the series is shorter than 2 or constant, where the
/// quantity is undefined. max_lag is capped at n - 1.
std::vector<double> sample_autocorrelation(const std::vector<double>& series,
                                           std::size_t max_lag);

}  // namespace windfield::eval
