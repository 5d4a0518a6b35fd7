#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace windfield {

using Vec2 = Eigen::Vector2d;
using Vec2c = Eigen::Vector2cd;
using Complex = std::complex<double>;

/// Horizontal position in projected plane coordinates plus altitude, all in
/// metres.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Integer frequency index. The physical angular frequency of component j is
/// pi * m_j in rescaled unit-square coordinates.
struct LatticePoint {
  int m1 = 0;
  int m2 = 0;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// A fitted interpolant: maps a plane position (metres) to a horizontal
/// velocity estimate (m/s). Altitude is carried so models that use it can.
class Interpolator {
 public:
  virtual ~Interpolator() = default;
  virtual Vec2 predict(const Point3& p) const = 0;
};

}  // namespace windfield

template <>
struct std::hash<windfield::LatticePoint> {
  std::size_t operator()(const windfield::LatticePoint& m) const noexcept {
    auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(m.m1));
    h = h * 0x9e3779b97f4a7c15ULL +
        static_cast<std::uint64_t>(static_cast<std::uint32_t>(m.m2));
    return static_cast<std::size_t>(h);
  }
};
