#include "windfield/baselines.hpp"

#include <cmath>
#include <limits>

#include "windfield/errors.hpp"

namespace windfield::baselines {
namespace {

void check_slice(const data::TimeSlice& slice) {
  if (slice.size() == 0) {
    throw DataError("baseline fit needs at least one observation");
  }
}

double plane_distance(const Point3& a, const Point3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Index of the closest station; ties go to the smallest station id. Slices
/// are sorted by id, so the first strict improvement wins.
std::size_t nearest_index(const data::TimeSlice& data, const Point3& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = plane_distance(data.points[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

IdwModel::IdwModel(data::TimeSlice data, double power)
    : data_(std::move(data)), power_(power) {
  check_slice(data_);
  if (!(power_ >= 0.0) || !std::isfinite(power_)) {
    throw ConfigError("inverse-distance power must be finite and "
                      "non-negative");
  }
}

Vec2 IdwModel::predict(const Point3& p) const {
  const std::size_t near = nearest_index(data_, p);
  const double dmin = plane_distance(data_.points[near], p);
  if (dmin == 0.0) return data_.velocities[near];
  double weight_sum = 0.0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double w =
        std::pow(dmin / plane_distance(data_.points[i], p), power_);
    weight_sum += w;
    acc += w * data_.velocities[i];
  }
  return acc / weight_sum;
}

NearestNeighborModel::NearestNeighborModel(data::TimeSlice data)
    : data_(std::move(data)) {
  check_slice(data_);
}

Vec2 NearestNeighborModel::predict(const Point3& p) const {
  return data_.velocities[nearest_index(data_, p)];
}

EnsembleModel::EnsembleModel(
    std::vector<std::shared_ptr<const Interpolator>> members,
    std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty() || members_.size() != weights_.size()) {
    throw ConfigError("ensemble needs one weight per member");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w)) throw ConfigError("non-finite ensemble weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("ensemble weights must sum to one");
  }
  for (const auto& member : members_) {
    if (!member) throw ConfigError("null ensemble member");
  }
}

Vec2 EnsembleModel::predict(const Point3& p) const {
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < members_.size(); ++i) {
    acc += weights_[i] * members_[i]->predict(p);
  }
  return acc;
}

std::unique_ptr<Interpolator> fit_idw(const data::TimeSlice& slice,
                                      double power) {
  return std::make_unique<IdwModel>(slice, power);
}

std::unique_ptr<Interpolator> fit_nearest(const data::TimeSlice& slice) {
  return std::make_unique<NearestNeighborModel>(slice);
}

}  // namespace windfield::baselines
