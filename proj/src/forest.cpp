#include "windfield/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "windfield/errors.hpp"
#include "windfield/rng.hpp"

namespace windfield::baselines {
namespace {

using FeatureRow = std::array<double, kPolynomialFeatureCount>;

struct TreeBuilder {
  const std::vector<FeatureRow>& features;
  const std::vector<Vec2>& targets;
  std::mt19937_64 rng;
  std::vector<RegressionTree::Node>& nodes;

  int build(std::vector<std::size_t> idx) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    Vec2 mean = Vec2::Zero();
    for (std::size_t i : idx) mean += targets[i];
    mean /= static_cast<double>(idx.size());

    bool pure = true;
    for (std::size_t i : idx) {
      if (targets[i].x() != targets[idx.front()].x() ||
          targets[i].y() != targets[idx.front()].y()) {
        pure = false;
        break;
      }
    }
    if (idx.size() == 1 || pure) {
      nodes[static_cast<std::size_t>(id)].value = mean;
      return id;
    }

    // One candidate feature per split, uniform among those that vary here.
    std::vector<int> varying;
    for (std::size_t f = 0; f < kPolynomialFeatureCount; ++f) {
      double lo = features[idx.front()][f];
      double hi = lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, features[i][f]);
        hi = std::max(hi, features[i][f]);
      }
      if (hi > lo) varying.push_back(static_cast<int>(f));
    }
    if (varying.empty()) {
      nodes[static_cast<std::size_t>(id)].value = mean;
      return id;
    }
    std::uniform_int_distribution<std::size_t> pick(0, varying.size() - 1);
    const int feature = varying[pick(rng)];

    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double fa = features[a][static_cast<std::size_t>(feature)];
      const double fb = features[b][static_cast<std::size_t>(feature)];
      return fa < fb || (fa == fb && a < b);
    });

    const std::size_t n = idx.size();
    std::vector<double> pu(n + 1, 0.0), pv(n + 1, 0.0), puu(n + 1, 0.0),
        pvv(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& t = targets[idx[i]];
      pu[i + 1] = pu[i] + t.x();
      pv[i + 1] = pv[i] + t.y();
      puu[i + 1] = puu[i] + t.x() * t.x();
      pvv[i + 1] = pvv[i] + t.y() * t.y();
    }
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < n; ++t) {
      const double left_val = features[idx[t - 1]][static_cast<std::size_t>(feature)];
      const double right_val = features[idx[t]][static_cast<std::size_t>(feature)];
      if (left_val == right_val) continue;
      const double nl = static_cast<double>(t);
      const double nr = static_cast<double>(n - t);
      const double sse_l =
          (puu[t] - pu[t] * pu[t] / nl) + (pvv[t] - pv[t] * pv[t] / nl);
      const double su_r = pu[n] - pu[t];
      const double sv_r = pv[n] - pv[t];
      const double sse_r = (puu[n] - puu[t] - su_r * su_r / nr) +
                           (pvv[n] - pvv[t] - sv_r * sv_r / nr);
      const double cost = sse_l + sse_r;
      if (cost < best_cost) {
        best_cost = cost;
        best_t = t;
      }
    }
    const double lo = features[idx[best_t - 1]][static_cast<std::size_t>(feature)];
    const double hi = features[idx[best_t]][static_cast<std::size_t>(feature)];

    std::vector<std::size_t> left_idx(idx.begin(),
                                      idx.begin() + static_cast<long>(best_t));
    std::vector<std::size_t> right_idx(idx.begin() + static_cast<long>(best_t),
                                       idx.end());
    idx.clear();
    idx.shrink_to_fit();
    const int left = build(std::move(left_idx));
    const int right = build(std::move(right_idx));

    RegressionTree::Node& node = nodes[static_cast<std::size_t>(id)];
    node.leaf = false;
    node.feature = feature;
    node.threshold = 0.5 * (lo + hi);
    node.left = left;
    node.right = right;
    node.value = mean;
    return id;
  }
};

}  // namespace

std::array<double, kPolynomialFeatureCount> polynomial_features(
    const Point3& p) {
  const double x = p.x, y = p.y, z = p.z;
  return {1.0,       x,         y,         z,         x * x,
          x * y,     x * z,     y * y,     y * z,     z * z,
          x * x * x, x * x * y, x * x * z, x * y * y, x * y * z,
          x * z * z, y * y * y, y * y * z, y * z * z, z * z * z};
}

RegressionTree::RegressionTree(const std::vector<FeatureRow>& features,
                               const std::vector<Vec2>& targets,
                               const std::vector<std::size_t>& sample,
                               std::uint64_t seed) {
  if (sample.empty()) throw DataError("regression tree needs samples");
  TreeBuilder builder{features, targets, make_rng(seed), nodes_};
  builder.build(sample);
}

Vec2 RegressionTree::predict(const FeatureRow& x) const {
  std::size_t id = 0;
  while (!nodes_[id].leaf) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(
        x[static_cast<std::size_t>(node.feature)] <= node.threshold
            ? node.left
            : node.right);
  }
  return nodes_[id].value;
}

ForestModel::ForestModel(const data::TimeSlice& data,
                         const ForestOptions& options, std::uint64_t seed) {
  if (data.size() == 0) {
    throw DataError("forest fit needs at least one observation");
  }
  if (options.tree_count < 1) {
    throw ConfigError("forest needs at least one tree");
  }
  std::vector<FeatureRow> features;
  features.reserve(data.size());
  for (const auto& p : data.points) features.push_back(polynomial_features(p));

  const std::size_t n = data.size();
  trees_.reserve(static_cast<std::size_t>(options.tree_count));
  for (int t = 0; t < options.tree_count; ++t) {
    std::vector<std::size_t> sample;
    sample.reserve(n);
    if (options.bootstrap) {
      auto rng = make_rng(derive_seed(seed, "forest-bootstrap",
                                      static_cast<std::uint64_t>(t)));
      std::uniform_int_distribution<std::size_t> draw(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) sample.push_back(draw(rng));
    } else {
      for (std::size_t i = 0; i < n; ++i) sample.push_back(i);
    }
    trees_.emplace_back(features, data.velocities, sample,
                        derive_seed(seed, "forest-tree",
                                    static_cast<std::uint64_t>(t)));
  }
}

Vec2 ForestModel::predict(const Point3& p) const {
  const FeatureRow x = polynomial_features(p);
  Vec2 acc = Vec2::Zero();
  for (const auto& tree : trees_) acc += tree.predict(x);
  return acc / static_cast<double>(trees_.size());
}

std::unique_ptr<ForestModel> fit_forest(const data::TimeSlice& slice,
                                        const ForestOptions& options,
                                        std::uint64_t seed) {
  return std::make_unique<ForestModel>(slice, options, seed);
}

}  // namespace windfield::baselines
