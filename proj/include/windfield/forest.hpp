#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::baselines {

inline constexpr std::size_t kPolynomialFeatureCount = 20;

/// All monomials of (x, y, z) up to total degree 3 in graded lexicographic
/// order: 1, x, y, z, x^2, xy, xz, y^2, yz, z^2, x^3, x^2 y, ..., z^3.
std::array<double, kPolynomialFeatureCount> polynomial_features(
    const Point3& p);

struct ForestOptions {
  int tree_count = 200;
  bool bootstrap = true;  // disable for exact reproduction of training data
};

/// Binary regression tree over the polynomial features, predicting both
/// velocity components jointly. Splits minimize the summed squared error of
/// the two components; each split considers exactly one feature drawn
/// uniformly among the features that vary within the node. Nodes are grown
/// until they hold a single sample or identical targets.
class RegressionTree {
 public:
  struct Node {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Vec2 value = Vec2::Zero();
  };

  RegressionTree(
      const std::vector<std::array<double, kPolynomialFeatureCount>>& features,
      const std::vector<Vec2>& targets, const std::vector<std::size_t>& sample,
      std::uint64_t seed);

  Vec2 predict(const std::array<double, kPolynomialFeatureCount>& x) const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class ForestModel : public Interpolator {
 public:
  ForestModel(const data::TimeSlice& data, const ForestOptions& options,
              std::uint64_t seed);

  Vec2 predict(const Point3& p) const override;
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

std::unique_ptr<ForestModel> fit_forest(const data::TimeSlice& slice,
                                        const ForestOptions& options,
                                        std::uint64_t seed);

}  // namespace windfield::baselines
