#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::baselines {

/// Linear variogram gamma(h) = nugget + slope * h for h > 0, with
/// gamma(0) = 0 so that interpolation honours the data exactly. Both
/// parameters are non-negative.
struct VariogramModel {
  double nugget = 0.0;
  double slope = 0.0;

  double operator()(double h) const {
    return h == 0.0 ? 0.0 : nugget + slope * h;
  }
};

/// Least-squares line through the binned empirical semivariances of the
/// pooled residual components. Pair semivariances are 0.5 * (r_i - r_j)^2
/// per component; bins are 10 equal widths up to half the maximum pairwise
/// distance (all pairs are kept when that range would be empty), empty bins
/// are skipped, and the fitted nugget and slope are clamped non-negative.
VariogramModel fit_variogram(const std::vector<Vec2>& positions,
                             const std::vector<Vec2>& residuals);

/// Universal kriging with a linear drift {1, x, y}. Drift and fluctuation
/// are estimated jointly through the augmented system
///   [ Gamma  F ] [d]   [u]
///   [ F^T    0 ] [c] = [0]
/// solved once per velocity component; predictions are
/// gamma(x)^T d + f(x)^T c, which reproduces the data exactly at stations.
/// The variogram is fitted to residuals of an ordinary least-squares drift
/// fit beforehand. An identically zero variogram (possible when the data
/// lie exactly in the drift span, e.g. a constant field) makes the
/// augmented system singular; the model then degenerates to the drift
/// least-squares fit, which is the zero-fluctuation limit of kriging.
class KrigingModel : public Interpolator {
 public:
  KrigingModel(const data::TimeSlice& data, VariogramModel variogram);

  Vec2 predict(const Point3& p) const override;
  /// Kriging variance of the interpolated value at p (same for both
  /// components; the two channels share the variogram).
  double predict_variance(const Point3& p) const;
  const VariogramModel& variogram() const { return variogram_; }

 private:
  Eigen::VectorXd augmented_covector(const Point3& p) const;

  std::vector<Vec2> positions_;
  VariogramModel variogram_;
  Vec2 drift_center_ = Vec2::Zero();
  Vec2 drift_scale_ = Vec2::Ones();
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd dual_u_;  // N station weights then 3 drift coefficients
  Eigen::VectorXd dual_v_;
  bool drift_only_ = false;  // zero-variogram limit: pure drift regression
  Eigen::Vector3d drift_u_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d drift_v_ = Eigen::Vector3d::Zero();
};

/// Fits drift, variogram and the augmented system from one slice. Needs at
/// least 3 stations in non-collinear position; degenerate geometry raises
/// DataError.
std::unique_ptr<KrigingModel> fit_kriging(const data::TimeSlice& slice);

}  // namespace windfield::baselines
