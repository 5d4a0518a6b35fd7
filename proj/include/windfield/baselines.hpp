#pragma once

#include <memory>
#include <vector>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::baselines {

/// Inverse-distance weighting in the horizontal plane. Weights are computed
/// as (dmin/d)^p, which is algebraically the usual 1/d^p weighting but stays
/// finite for any power; a query that coincides with a station returns that
/// station's value (smallest station id on ties).
class IdwModel : public Interpolator {
 public:
  IdwModel(data::TimeSlice data, double power);
  Vec2 predict(const Point3& p) const override;

 private:
  data::TimeSlice data_;
  double power_;
};

/// Value of the horizontally closest station; ties broken by smallest
/// station id.
class NearestNeighborModel : public Interpolator {
 public:
  explicit NearestNeighborModel(data::TimeSlice data);
  Vec2 predict(const Point3& p) const override;

 private:
  data::TimeSlice data_;
};

/// Convex-style combination sum_i alpha_i f_i with weights that must sum to
/// one (individual weights may be negative).
class EnsembleModel : public Interpolator {
 public:
  EnsembleModel(std::vector<std::shared_ptr<const Interpolator>> members,
                std::vector<double> weights);
  Vec2 predict(const Point3& p) const override;

 private:
  std::vector<std::shared_ptr<const Interpolator>> members_;
  std::vector<double> weights_;
};

std::unique_ptr<Interpolator> fit_idw(const data::TimeSlice& slice,
                                      double power);
std::unique_ptr<Interpolator> fit_nearest(const data::TimeSlice& slice);

/// Predicts zero everywhere; the reference against which relative errors
/// are reported.
class ZeroModel : public Interpolator {
 public:
  Vec2 predict(const Point3&) const override { return Vec2::Zero(); }
};

}  // namespace windfield::baselines
