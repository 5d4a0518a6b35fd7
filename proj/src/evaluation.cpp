#include "windfield/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "windfield/baselines.hpp"
#include "windfield/errors.hpp"
#include "windfield/parallel.hpp"
#include "windfield/rng.hpp"

namespace windfield::eval {
namespace {

std::string slice_context(int fold, std::int64_t time) {
  return "fold " + std::to_string(fold) + " at " +
         data::format_time_iso8601(time) + ": ";
}

void check_matched(const std::vector<SliceScore>& a,
                   const std::vector<SliceScore>& b, const char* what) {
  if (a.size() != b.size()) {
    throw DataError(std::string(what) + ": score lists differ in length");
  }
  if (a.size() < 2) {
    throw DataError(std::string(what) + ": needs at least two slices");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time != b[i].time) {
      throw DataError(std::string(what) +
                      ": score lists cover different slices");
    }
  }
}

double mean_of(const std::vector<SliceScore>& scores) {
  double sum = 0.0;
  for (const auto& s : scores) sum += s.q;
  return sum / static_cast<double>(scores.size());
}

/// Population (1/n) variance of the per-slice values.
double population_variance(const std::vector<double>& values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(values.size());
}

}  // namespace

Trainer make_zero_trainer() {
  return [](const data::TimeSlice&) -> std::unique_ptr<Interpolator> {
    return std::make_unique<baselines::ZeroModel>();
  };
}

FoldAssignment make_folds(const std::vector<std::string>& station_ids,
                          int fold_count, std::uint64_t seed) {
  if (fold_count < 2) {
    throw ConfigError("cross-validation needs at least 2 folds");
  }
  if (station_ids.size() < static_cast<std::size_t>(fold_count)) {
    throw DataError("fewer stations than folds");
  }
  std::vector<std::string> ids = station_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw DataError("duplicate station ids in fold assignment");
  }
  auto rng = make_rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  FoldAssignment folds;
  folds.fold_count = fold_count;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    folds.fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(
                                                     fold_count));
  }
  return folds;
}

SliceScore slice_quality(const Trainer& trainer, const data::TimeSlice& slice,
                         const FoldAssignment& folds) {
  if (slice.size() == 0) throw DataError("empty slice");
  if (folds.fold_count < 2) throw ConfigError("fold assignment is empty");

  // Canonical station order makes the score independent of row order.
  std::vector<std::size_t> order(slice.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return slice.station_ids[a] < slice.station_ids[b];
  });
  for (std::size_t i : order) {
    if (!folds.fold_of.count(slice.station_ids[i])) {
      throw DataError("station '" + slice.station_ids[i] +
                      "' has no fold assignment");
    }
  }

  double total = 0.0;
  for (int fold = 0; fold < folds.fold_count; ++fold) {
    data::TimeSlice train;
    train.time = slice.time;
    std::vector<std::size_t> test;
    for (std::size_t i : order) {
      if (folds.fold_of.at(slice.station_ids[i]) == fold) {
        test.push_back(i);
      } else {
        train.station_ids.push_back(slice.station_ids[i]);
        train.points.push_back(slice.points[i]);
        train.velocities.push_back(slice.velocities[i]);
      }
    }
    if (test.empty()) continue;
    if (train.size() == 0) {
      throw DataError(slice_context(fold, slice.time) +
                      "held-out fold leaves no training stations");
    }
    std::unique_ptr<Interpolator> model;
    try {
      model = trainer(train);
    } catch (const ConfigError& e) {
      throw ConfigError(slice_context(fold, slice.time) + e.what());
    } catch (const DataError& e) {
      throw DataError(slice_context(fold, slice.time) + e.what());
    } catch (const NumericError& e) {
      throw NumericError(slice_context(fold, slice.time) + e.what());
    }
    for (std::size_t i : test) {
      total += (model->predict(slice.points[i]) - slice.velocities[i])
                   .squaredNorm();
    }
  }
  return SliceScore{slice.time, total / static_cast<double>(slice.size()),
                    slice.size()};
}

QualityReport aggregate(const std::vector<SliceScore>& scores,
                        const std::vector<SliceScore>& zero_scores) {
  check_matched(scores, zero_scores, "aggregate");
  QualityReport report;
  report.samples = scores.size();
  report.q_tilde = mean_of(scores);
  std::vector<double> qs;
  qs.reserve(scores.size());
  for (const auto& s : scores) qs.push_back(s.q);
  report.var_q_t = population_variance(qs, report.q_tilde);
  report.var_q_tilde = report.var_q_t / static_cast<double>(scores.size());
  report.q_zero = mean_of(zero_scores);
  if (report.q_zero <= 0.0) {
    throw NumericError("zero-reference score vanishes; relative error is "
                       "undefined");
  }
  report.e_tilde = report.q_tilde / report.q_zero;
  report.ci_half_width = 2.0 * std::sqrt(report.var_q_tilde);
  return report;
}

DifferenceReport paired_difference(const std::vector<SliceScore>& f,
                                   const std::vector<SliceScore>& g) {
  check_matched(f, g, "paired difference");
  DifferenceReport report;
  report.samples = f.size();
  std::vector<double> deltas;
  deltas.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    deltas.push_back(f[i].q - g[i].q);
  }
  report.delta_q = std::accumulate(deltas.begin(), deltas.end(), 0.0) /
                   static_cast<double>(deltas.size());
  report.var_delta_t = population_variance(deltas, report.delta_q);
  report.var_delta = report.var_delta_t / static_cast<double>(deltas.size());
  report.ci_half_width = 2.0 * std::sqrt(report.var_delta);
  return report;
}

GridResult grid_search(const std::vector<GridCandidate>& candidates,
                       const std::vector<data::TimeSlice>& slices,
                       int fold_count, std::uint64_t master_seed, int jobs) {
  if (candidates.empty()) throw ConfigError("grid search needs candidates");
  if (slices.size() < 2) {
    throw DataError("grid search needs at least two slices");
  }
  std::vector<FoldAssignment> folds;
  folds.reserve(slices.size());
  for (const auto& slice : slices) {
    folds.push_back(make_folds(
        slice.station_ids, fold_count,
        derive_seed(master_seed, "folds",
                    static_cast<std::uint64_t>(slice.time))));
  }

  GridResult result;
  result.zero_scores.resize(slices.size());
  const Trainer zero = make_zero_trainer();
  for (std::size_t s = 0; s < slices.size(); ++s) {
    result.zero_scores[s] = slice_quality(zero, slices[s], folds[s]);
  }

  result.scores.assign(candidates.size(),
                       std::vector<SliceScore>(slices.size()));
  parallel_for_indexed(
      jobs, candidates.size() * slices.size(), [&](std::size_t task) {
        const std::size_t c = task / slices.size();
        const std::size_t s = task % slices.size();
        result.scores[c][s] =
            slice_quality(candidates[c].trainer, slices[s], folds[s]);
      });

  result.rows.reserve(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    result.rows.push_back(GridRow{
        candidates[c].label, aggregate(result.scores[c], result.zero_scores)});
    if (result.rows[c].report.e_tilde <
        result.rows[result.best_index].report.e_tilde) {
      result.best_index = c;
    }
  }
  return result;
}

std::vector<double> bootstrap_distribution(const std::vector<double>& values,
                                           std::size_t resamples,
                                           std::size_t subsample_size,
                                           std::uint64_t seed) {
  if (values.empty()) throw DataError("bootstrap needs values");
  if (subsample_size < 1 || subsample_size > values.size()) {
    throw ConfigError("bootstrap subsample size must lie in [1, n]");
  }
  auto rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> draw(0, values.size() - 1);
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < subsample_size; ++i) sum += values[draw(rng)];
    means.push_back(sum / static_cast<double>(subsample_size));
  }
  return means;
}

std::vector<double> sample_autocorrelation(const std::vector<double>& series,
                                           std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2) return {};
  const double mean =
      std::accumulate(series.begin(), series.end(), 0.0) /
      static_cast<double>(n);
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (denom == 0.0) return {};
  const std::size_t lags = std::min(max_lag, n - 1);
  std::vector<double> out;
  out.reserve(lags + 1);
  for (std::size_t lag = 0; lag <= lags; ++lag) {
    double num = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      num += (series[t] - mean) * (series[t + lag] - mean);
    }
    out.push_back(num / denom);
  }
  return out;
}

}  // namespace windfield::eval
