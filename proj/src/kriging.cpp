#include "windfield/kriging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "windfield/errors.hpp"

namespace windfield::baselines {
namespace {

constexpr int kBinCount = 10;

struct BinnedPoint {
  double center;
  double value;
};

/// Mean semivariance per distance bin; empty bins dropped.
std::vector<BinnedPoint> bin_semivariances(
    const std::vector<std::pair<double, double>>& samples, double range) {
  std::array<double, kBinCount> sums{};
  std::array<std::size_t, kBinCount> counts{};
  const double width = range / kBinCount;
  for (const auto& [h, gamma] : samples) {
    if (h > range) continue;
    const int idx =
        std::min(kBinCount - 1, static_cast<int>(std::floor(h / width)));
    sums[static_cast<std::size_t>(idx)] += gamma;
    counts[static_cast<std::size_t>(idx)] += 1;
  }
  std::vector<BinnedPoint> bins;
  for (int b = 0; b < kBinCount; ++b) {
    if (counts[static_cast<std::size_t>(b)] == 0) continue;
    bins.push_back(BinnedPoint{(b + 0.5) * width,
                               sums[static_cast<std::size_t>(b)] /
                                   counts[static_cast<std::size_t>(b)]});
  }
  return bins;
}

double line_sse(const std::vector<BinnedPoint>& bins, double nugget,
                double slope) {
  double sse = 0.0;
  for (const auto& b : bins) {
    const double r = b.value - (nugget + slope * b.center);
    sse += r * r;
  }
  return sse;
}

}  // namespace

VariogramModel fit_variogram(const std::vector<Vec2>& positions,
                             const std::vector<Vec2>& residuals) {
  if (positions.size() != residuals.size() || positions.size() < 2) {
    throw DataError("variogram fit needs at least two matched stations");
  }
  std::vector<std::pair<double, double>> samples;
  double hmax = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const double h = (positions[i] - positions[j]).norm();
      hmax = std::max(hmax, h);
      const Vec2 d = residuals[i] - residuals[j];
      samples.emplace_back(h, 0.5 * d.x() * d.x());
      samples.emplace_back(h, 0.5 * d.y() * d.y());
    }
  }
  if (hmax == 0.0) {
    throw DataError("variogram fit: all stations coincide");
  }
  // Pairs beyond half the maximum distance are unreliable and dropped, but
  // tiny networks where that leaves nothing keep every pair.
  auto bins = bin_semivariances(samples, hmax / 2.0);
  if (bins.empty()) bins = bin_semivariances(samples, hmax);

  VariogramModel vm;
  if (bins.size() == 1) {
    // One bin cannot separate nugget from slope; take the line through the
    // origin.
    vm.nugget = 0.0;
    vm.slope = bins[0].value / bins[0].center;
    return vm;
  }
  const double n = static_cast<double>(bins.size());
  double sh = 0.0, sg = 0.0, shh = 0.0, shg = 0.0;
  for (const auto& b : bins) {
    sh += b.center;
    sg += b.value;
    shh += b.center * b.center;
    shg += b.center * b.value;
  }
  const double denom = n * shh - sh * sh;
  const double slope_free = (n * shg - sh * sg) / denom;
  const double nugget_free = (sg - slope_free * sh) / n;
  if (slope_free >= 0.0 && nugget_free >= 0.0) {
    vm.slope = slope_free;
    vm.nugget = nugget_free;
    return vm;
  }
  // Constrained fit: the best non-negative line sits on a boundary.
  const double slope_origin = std::max(0.0, shg / shh);
  const double nugget_flat = std::max(0.0, sg / n);
  if (line_sse(bins, 0.0, slope_origin) <= line_sse(bins, nugget_flat, 0.0)) {
    vm.slope = slope_origin;
  } else {
    vm.nugget = nugget_flat;
  }
  return vm;
}

KrigingModel::KrigingModel(const data::TimeSlice& data,
                           VariogramModel variogram)
    : variogram_(variogram) {
  const auto N = static_cast<Eigen::Index>(data.size());
  if (N < 3) {
    throw DataError("universal kriging needs at least 3 stations");
  }
  if (!(variogram_.nugget >= 0.0) || !(variogram_.slope >= 0.0) ||
      !std::isfinite(variogram_.nugget) || !std::isfinite(variogram_.slope)) {
    throw ConfigError("variogram parameters must be finite and non-negative");
  }
  positions_.reserve(data.size());
  for (const auto& p : data.points) positions_.emplace_back(p.x, p.y);

  // Centered, scaled drift coordinates keep the augmented system well
  // conditioned when positions are in metres.
  Vec2 lo = positions_[0], hi = positions_[0];
  for (const auto& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  drift_center_ = 0.5 * (lo + hi);
  drift_scale_ = 0.5 * (hi - lo);
  if (drift_scale_.x() <= 0.0) drift_scale_.x() = 1.0;
  if (drift_scale_.y() <= 0.0) drift_scale_.y() = 1.0;

  // Zero-fluctuation limit: when the fitted variogram is negligible on the
  // scale of the data (drift residuals at rounding level, e.g. a constant
  // field), the augmented system is singular but the model is well defined
  // as the plain drift regression.
  double vscale = 0.0;
  for (const auto& v : data.velocities) {
    vscale = std::max(vscale, v.squaredNorm());
  }
  const double hdiam = (hi - lo).norm();
  const double gamma_max = variogram_.nugget + variogram_.slope * hdiam;
  if (gamma_max <= 1e-20 * vscale) {
    Eigen::MatrixXd F(N, 3);
    Eigen::VectorXd U(N), V(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      const Vec2 t = (positions_[static_cast<std::size_t>(i)] - drift_center_)
                         .cwiseQuotient(drift_scale_);
      F(i, 0) = 1.0;
      F(i, 1) = t.x();
      F(i, 2) = t.y();
      U(i) = data.velocities[static_cast<std::size_t>(i)].x();
      V(i) = data.velocities[static_cast<std::size_t>(i)].y();
    }
    const auto qr = F.colPivHouseholderQr();
    if (qr.rank() < 3) {
      throw DataError("kriging system is singular: station geometry is "
                      "degenerate (coincident or collinear stations)");
    }
    drift_only_ = true;
    drift_u_ = qr.solve(U);
    drift_v_ = qr.solve(V);
    return;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 3, N + 3);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const double g = variogram_(
          (positions_[static_cast<std::size_t>(i)] -
           positions_[static_cast<std::size_t>(j)]).norm());
      A(i, j) = g;
      A(j, i) = g;
    }
    const Vec2 t = (positions_[static_cast<std::size_t>(i)] - drift_center_)
                       .cwiseQuotient(drift_scale_);
    A(i, N) = 1.0;
    A(i, N + 1) = t.x();
    A(i, N + 2) = t.y();
    A(N, i) = 1.0;
    A(N + 1, i) = t.x();
    A(N + 2, i) = t.y();
  }
  lu_.compute(A);
  if (!lu_.isInvertible()) {
    throw DataError("kriging system is singular: station geometry is "
                    "degenerate (coincident or collinear stations)");
  }
  Eigen::VectorXd rhs_u = Eigen::VectorXd::Zero(N + 3);
  Eigen::VectorXd rhs_v = Eigen::VectorXd::Zero(N + 3);
  for (Eigen::Index i = 0; i < N; ++i) {
    rhs_u(i) = data.velocities[static_cast<std::size_t>(i)].x();
    rhs_v(i) = data.velocities[static_cast<std::size_t>(i)].y();
  }
  dual_u_ = lu_.solve(rhs_u);
  dual_v_ = lu_.solve(rhs_v);
}

Eigen::VectorXd KrigingModel::augmented_covector(const Point3& p) const {
  const auto N = static_cast<Eigen::Index>(positions_.size());
  Eigen::VectorXd a(N + 3);
  const Vec2 q(p.x, p.y);
  for (Eigen::Index i = 0; i < N; ++i) {
    a(i) = variogram_((positions_[static_cast<std::size_t>(i)] - q).norm());
  }
  const Vec2 t = (q - drift_center_).cwiseQuotient(drift_scale_);
  a(N) = 1.0;
  a(N + 1) = t.x();
  a(N + 2) = t.y();
  return a;
}

Vec2 KrigingModel::predict(const Point3& p) const {
  if (drift_only_) {
    const Vec2 t =
        (Vec2(p.x, p.y) - drift_center_).cwiseQuotient(drift_scale_);
    const Eigen::Vector3d f(1.0, t.x(), t.y());
    return Vec2(f.dot(drift_u_), f.dot(drift_v_));
  }
  const Eigen::VectorXd a = augmented_covector(p);
  return Vec2(a.dot(dual_u_), a.dot(dual_v_));
}

double KrigingModel::predict_variance(const Point3& p) const {
  if (drift_only_) return 0.0;
  const Eigen::VectorXd a = augmented_covector(p);
  const Eigen::VectorXd primal = lu_.solve(a);
  return std::max(0.0, a.dot(primal));
}

std::unique_ptr<KrigingModel> fit_kriging(const data::TimeSlice& slice) {
  const auto N = static_cast<Eigen::Index>(slice.size());
  if (N < 3) {
    throw DataError("universal kriging needs at least 3 stations");
  }
  std::vector<Vec2> positions;
  positions.reserve(slice.size());
  Vec2 lo(slice.points[0].x, slice.points[0].y);
  Vec2 hi = lo;
  for (const auto& p : slice.points) {
    positions.emplace_back(p.x, p.y);
    lo = lo.cwiseMin(positions.back());
    hi = hi.cwiseMax(positions.back());
  }
  const Vec2 center = 0.5 * (lo + hi);
  Vec2 scale = 0.5 * (hi - lo);
  if (scale.x() <= 0.0) scale.x() = 1.0;
  if (scale.y() <= 0.0) scale.y() = 1.0;

  Eigen::MatrixXd F(N, 3);
  Eigen::VectorXd U(N), V(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Vec2 t =
        (positions[static_cast<std::size_t>(i)] - center).cwiseQuotient(scale);
    F(i, 0) = 1.0;
    F(i, 1) = t.x();
    F(i, 2) = t.y();
    U(i) = slice.velocities[static_cast<std::size_t>(i)].x();
    V(i) = slice.velocities[static_cast<std::size_t>(i)].y();
  }
  const auto qr = F.colPivHouseholderQr();
  const Eigen::VectorXd ru = U - F * qr.solve(U);
  const Eigen::VectorXd rv = V - F * qr.solve(V);
  std::vector<Vec2> residuals;
  residuals.reserve(slice.size());
  for (Eigen::Index i = 0; i < N; ++i) residuals.emplace_back(ru(i), rv(i));

  return std::make_unique<KrigingModel>(slice,
                                        fit_variogram(positions, residuals));
}

}  // namespace windfield::baselines
