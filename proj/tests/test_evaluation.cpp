#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "support/test_support.hpp"
#include "windfield/baselines.hpp"
#include "windfield/errors.hpp"
#include "windfield/evaluation.hpp"
#include "windfield/rng.hpp"

using namespace windfield;
using namespace windfield::eval;

namespace {

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("S" + std::to_string(1000 + i));
  return ids;
}

data::TimeSlice three_station_slice() {
  data::TimeSlice s;
  s.time = 7200;
  s.station_ids = {"A", "B", "C"};
  s.points = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {3.0, 0.0, 0.0}};
  s.velocities = {Vec2(1, 0), Vec2(0, 2), Vec2(-1, 1)};
  return s;
}

Trainer nearest_trainer() {
  return [](const data::TimeSlice& slice) {
    return baselines::fit_nearest(slice);
  };
}

std::vector<SliceScore> scores_of(std::vector<double> qs) {
  std::vector<SliceScore> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    out.push_back(SliceScore{static_cast<std::int64_t>(3600 * i), qs[i], 10});
  }
  return out;
}

data::TimeSlice smooth_slice(std::int64_t time, unsigned seed, int n) {
  // A smooth, spatially structured field that a nearest-neighbor fit
  // beats the zero model on.
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point3> pts;
  std::vector<Vec2> vel;
  for (int i = 0; i < n; ++i) {
    const double x = unif(rng), y = unif(rng);
    pts.push_back({x, y, 0.0});
    vel.emplace_back(2.0 + std::sin(3.0 * x), 1.0 + std::cos(2.0 * y));
  }
  auto s = testsupport::make_slice(pts, vel);
  s.time = time;
  return s;
}

}  // namespace

TEST_CASE("fold assignment: sizes, partition, determinism") {
  const auto ids10 = numbered_ids(10);
  const FoldAssignment f10 = make_folds(ids10, 5, 99);
  std::vector<int> count10(5, 0);
  for (const auto& id : ids10) {
    REQUIRE(f10.fold_of.count(id) == 1);
    const int fold = f10.fold_of.at(id);
    REQUIRE(fold >= 0);
    REQUIRE(fold < 5);
    ++count10[static_cast<std::size_t>(fold)];
  }
  for (int c : count10) CHECK(c == 2);

  const auto ids171 = numbered_ids(171);
  const FoldAssignment f171 = make_folds(ids171, 5, 4242);
  std::vector<int> count171(5, 0);
  for (const auto& id : ids171) {
    ++count171[static_cast<std::size_t>(f171.fold_of.at(id))];
  }
  std::sort(count171.begin(), count171.end());
  CHECK(count171 == std::vector<int>{34, 34, 34, 34, 35});
  CHECK(f171.fold_of.size() == 171);  // union covers every station once

  // Deterministic in the seed; sensitive to it.
  const FoldAssignment again = make_folds(ids171, 5, 4242);
  CHECK(again.fold_of == f171.fold_of);
  const FoldAssignment other = make_folds(ids171, 5, 4243);
  CHECK(other.fold_of != f171.fold_of);

  // Invariant to the order station ids are given in.
  auto shuffled = ids171;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(make_folds(shuffled, 5, 4242).fold_of == f171.fold_of);

  CHECK_THROWS_AS(make_folds(numbered_ids(4), 5, 1), DataError);
  CHECK_THROWS_AS(make_folds(ids10, 1, 1), ConfigError);
  auto dup = numbered_ids(6);
  dup[3] = dup[0];
  CHECK_THROWS_AS(make_folds(dup, 2, 1), DataError);
}

TEST_CASE("slice quality: three-station leave-one-out by hand") {
  const data::TimeSlice slice = three_station_slice();
  FoldAssignment folds;
  folds.fold_count = 3;
  folds.fold_of = {{"A", 0}, {"B", 1}, {"C", 2}};
  const SliceScore s = slice_quality(nearest_trainer(), slice, folds);
  // Held-out A -> nearest is B: ||(1,0)-(0,2)||^2 = 5
  // Held-out B -> nearest is A: ||(0,2)-(1,0)||^2 = 5
  // Held-out C -> nearest is B: ||(-1,1)-(0,2)||^2 = 2
  CHECK(s.q == 4.0);
  CHECK(s.time == 7200);
  CHECK(s.stations == 3);
}

TEST_CASE("slice quality: oracle model scores zero, zero model scores mean "
          "squared speed") {
  data::TimeSlice slice = smooth_slice(0, 5, 12);
  for (auto& v : slice.velocities) v = Vec2(2, 1);
  const FoldAssignment folds = make_folds(slice.station_ids, 3, 8);

  // An interpolator that happens to equal the truth everywhere.
  Trainer oracle = [](const data::TimeSlice&) {
    data::TimeSlice one;
    one.time = 0;
    one.station_ids = {"O"};
    one.points = {{0.0, 0.0, 0.0}};
    one.velocities = {Vec2(2, 1)};
    return std::unique_ptr<Interpolator>(
        baselines::fit_idw(one, 2.0).release());
  };
  CHECK(slice_quality(oracle, slice, folds).q == 0.0);

  const SliceScore zero = slice_quality(make_zero_trainer(), slice, folds);
  double mss = 0.0;
  for (const auto& v : slice.velocities) mss += v.squaredNorm();
  mss /= static_cast<double>(slice.size());
  CHECK(zero.q == doctest::Approx(mss).epsilon(1e-15));
}

TEST_CASE("slice quality: invariant to station row order") {
  const data::TimeSlice slice = smooth_slice(3600, 21, 15);
  const FoldAssignment folds = make_folds(slice.station_ids, 4, 13);
  const SliceScore base = slice_quality(nearest_trainer(), slice, folds);

  data::TimeSlice shuffled = slice;
  std::vector<std::size_t> perm(slice.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(2);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.station_ids[i] = slice.station_ids[perm[i]];
    shuffled.points[i] = slice.points[perm[i]];
    shuffled.velocities[i] = slice.velocities[perm[i]];
  }
  const SliceScore moved = slice_quality(nearest_trainer(), shuffled, folds);
  CHECK(moved.q == base.q);
}

TEST_CASE("slice quality: errors name the fold and time") {
  const data::TimeSlice slice = three_station_slice();
  FoldAssignment folds;
  folds.fold_count = 2;
  folds.fold_of = {{"A", 0}, {"B", 0}, {"C", 0}};
  try {
    slice_quality(make_zero_trainer(), slice, folds);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fold 0") != std::string::npos);
  }

  // A trainer failure is rethrown with the fold context, keeping its type.
  Trainer broken = [](const data::TimeSlice&) -> std::unique_ptr<Interpolator> {
    throw ConfigError("bad trainer setting");
  };
  const FoldAssignment ok = make_folds(slice.station_ids, 3, 1);
  try {
    slice_quality(broken, slice, ok);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fold") != std::string::npos);
    CHECK(msg.find("bad trainer setting") != std::string::npos);
  }

  data::TimeSlice empty;
  CHECK_THROWS_AS(slice_quality(make_zero_trainer(), empty, ok), DataError);

  data::TimeSlice stranger = slice;
  stranger.station_ids[1] = "UNKNOWN";
  CHECK_THROWS_AS(slice_quality(make_zero_trainer(), stranger, ok),
                  DataError);
}

TEST_CASE("aggregate: hand arithmetic with the 1/n convention") {
  const auto scores = scores_of({2.0, 4.0});
  const auto zeros = scores_of({1.0, 1.0});
  const QualityReport r = aggregate(scores, zeros);
  CHECK(r.q_tilde == 3.0);
  CHECK(r.var_q_t == 1.0);
  CHECK(r.var_q_tilde == 0.5);
  CHECK(r.q_zero == 1.0);
  CHECK(r.e_tilde == 3.0);
  CHECK(r.ci_half_width == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-15));
  CHECK(r.samples == 2);

  // Constant scores have zero variance.
  const auto flat = aggregate(scores_of({5.0, 5.0, 5.0}),
                              scores_of({2.0, 2.0, 2.0}));
  CHECK(flat.q_tilde == 5.0);
  CHECK(flat.var_q_t == 0.0);
  CHECK(flat.ci_half_width == 0.0);

  // The zero model scored against itself is exactly 1.
  const auto self = aggregate(zeros, zeros);
  CHECK(self.e_tilde == 1.0);

  // Mean is invariant to score order.
  auto reversed = scores;
  std::reverse(reversed.begin(), reversed.end());
  auto rzeros = zeros;
  std::reverse(rzeros.begin(), rzeros.end());
  CHECK(aggregate(reversed, rzeros).q_tilde == r.q_tilde);
  CHECK(aggregate(reversed, rzeros).var_q_t == r.var_q_t);

  CHECK_THROWS_AS(aggregate(scores_of({1.0}), scores_of({1.0})), DataError);
  CHECK_THROWS_AS(aggregate(scores, scores_of({1.0, 1.0, 1.0})), DataError);
  auto offset = zeros;
  offset[0].time += 1;
  CHECK_THROWS_AS(aggregate(scores, offset), DataError);
  CHECK_THROWS_AS(aggregate(scores, scores_of({0.0, 0.0})), NumericError);
}

TEST_CASE("paired difference: hand arithmetic and antisymmetry") {
  const auto f = scores_of({3.0, 7.0});
  const auto g = scores_of({2.0, 4.0});  // differences {1, 3}
  const DifferenceReport d = paired_difference(f, g);
  CHECK(d.delta_q == 2.0);
  CHECK(d.var_delta_t == 1.0);
  CHECK(d.var_delta == 0.5);
  CHECK(d.ci_half_width == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-15));
  CHECK(d.samples == 2);

  const DifferenceReport swapped = paired_difference(g, f);
  CHECK(swapped.delta_q == -d.delta_q);
  CHECK(swapped.var_delta_t == d.var_delta_t);
  CHECK(swapped.var_delta == d.var_delta);

  const DifferenceReport same = paired_difference(f, f);
  CHECK(same.delta_q == 0.0);
  CHECK(same.var_delta_t == 0.0);

  auto offset = g;
  offset[1].time += 1;
  CHECK_THROWS_AS(paired_difference(f, offset), DataError);
}

TEST_CASE("grid search: shared folds, argmin, tie and error rules") {
  std::vector<data::TimeSlice> slices = {smooth_slice(0, 31, 20),
                                         smooth_slice(3600, 32, 20),
                                         smooth_slice(7200, 33, 20)};
  std::vector<GridCandidate> cands;
  cands.push_back({"zero", make_zero_trainer()});
  cands.push_back({"nn", nearest_trainer()});
  cands.push_back({"nn-again", nearest_trainer()});

  const GridResult res = grid_search(cands, slices, 4, 777, 2);
  REQUIRE(res.rows.size() == 3);
  REQUIRE(res.scores.size() == 3);
  REQUIRE(res.zero_scores.size() == 3);
  for (const auto& per_candidate : res.scores) {
    CHECK(per_candidate.size() == 3);
  }
  // The zero candidate reproduces the baseline exactly; its E is 1.
  CHECK(res.rows[0].report.e_tilde == 1.0);
  // Identical candidates share fold assignments, so their per-slice
  // scores agree bitwise.
  for (std::size_t s = 0; s < slices.size(); ++s) {
    CHECK(res.scores[1][s].q == res.scores[2][s].q);
  }
  // Nearest neighbor beats the zero model on this smooth field, and the
  // argmin respects candidate order on ties.
  CHECK(res.rows[1].report.e_tilde < 1.0);
  CHECK(res.best_index == 1);

  // Deterministic end to end, independent of thread count.
  const GridResult again = grid_search(cands, slices, 4, 777, 1);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    for (std::size_t s = 0; s < slices.size(); ++s) {
      CHECK(again.scores[c][s].q == res.scores[c][s].q);
    }
  }

  CHECK_THROWS_AS(grid_search({}, slices, 4, 1, 1), ConfigError);
  const std::vector<data::TimeSlice> one = {slices[0]};
  CHECK_THROWS_AS(grid_search(cands, one, 4, 1, 1), DataError);
}

TEST_CASE("bootstrap distribution: determinism, edges, consistency") {
  std::vector<double> values;
  auto rng = make_rng(555);
  std::normal_distribution<double> n01(5.0, 1.0);
  for (int i = 0; i < 500; ++i) values.push_back(n01(rng));

  CHECK(bootstrap_distribution(values, 0, 50, 1).empty());
  CHECK_THROWS_AS(bootstrap_distribution(values, 10, 0, 1), ConfigError);
  CHECK_THROWS_AS(bootstrap_distribution(values, 10, 501, 1), ConfigError);
  CHECK_THROWS_AS(bootstrap_distribution({}, 10, 1, 1), DataError);

  const std::vector<double> flat(20, 3.25);
  for (double m : bootstrap_distribution(flat, 100, 7, 2)) CHECK(m == 3.25);

  const auto a = bootstrap_distribution(values, 50, 10, 9);
  const auto b = bootstrap_distribution(values, 50, 10, 9);
  CHECK(a == b);

  // 5000 resampled means of size 50: the histogram mean sits within two
  // standard errors of the sample mean and the spread matches s/sqrt(50).
  const auto means = bootstrap_distribution(values, 5000, 50, 777);
  REQUIRE(means.size() == 5000);
  double sample_mean = 0.0;
  for (double v : values) sample_mean += v;
  sample_mean /= 500.0;
  double sample_var = 0.0;
  for (double v : values) sample_var += (v - sample_mean) * (v - sample_mean);
  sample_var /= 500.0;
  double hist_mean = 0.0;
  for (double m : means) hist_mean += m;
  hist_mean /= 5000.0;
  const double se = std::sqrt(sample_var / 50.0);
  CHECK(std::abs(hist_mean - sample_mean) <= 2.0 * se);
  double hist_var = 0.0;
  for (double m : means) hist_var += (m - hist_mean) * (m - hist_mean);
  hist_var /= 5000.0;
  CHECK(std::sqrt(hist_var) >= 0.8 * se);
  CHECK(std::sqrt(hist_var) <= 1.2 * se);
}

TEST_CASE("sample autocorrelation: exact anchors and an AR(1) check") {
  CHECK(sample_autocorrelation({}, 5).empty());
  CHECK(sample_autocorrelation({1.0}, 5).empty());
  CHECK(sample_autocorrelation(std::vector<double>(50, 2.5), 5).empty());

  const std::vector<double> small = {1.0, 2.0, 0.5, -1.0, 4.0};
  const auto r = sample_autocorrelation(small, 100);
  REQUIRE(r.size() == 5);  // lags capped at n - 1
  CHECK(r[0] == 1.0);

  // Alternating series: lag-1 autocorrelation is -(n-1)/n.
  std::vector<double> alt;
  for (int i = 0; i < 100; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto ra = sample_autocorrelation(alt, 1);
  CHECK(ra[1] == doctest::Approx(-0.99).epsilon(1e-12));

  // AR(1) with coefficient 0.9: the lag-1 estimate lands within 0.02.
  auto rng = make_rng(31337);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> series;
  double x = 0.0;
  for (int t = 0; t < 10000; ++t) {
    x = 0.9 * x + n01(rng);
    series.push_back(x);
  }
  const auto rr = sample_autocorrelation(series, 3);
  CHECK(std::abs(rr[1] - 0.9) <= 0.02);
  CHECK(rr[2] <= 1.0);
}
