#pragma once

#include <cstdint>
#include <vector>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::synth {

/// Truth field built from complex exponentials on the integer lattice:
///   f(t) = sum_k coeffs[k] * exp(i pi (m1 t1 + m2 t2))
/// with t the unit-square coordinate (p - origin) / tau. Real-valued iff the
/// support and coefficients are conjugate-symmetric.
struct BandlimitedField {
  std::vector<LatticePoint> support;
  std::vector<Vec2c> coeffs;  // one complex pair per support point
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);

  void validate() const;
  bool conjugate_symmetric(double tol = 1e-12) const;
  Vec2c eval_complex_unit(const Vec2& unit) const;
  Vec2 eval_unit(const Vec2& unit) const;
  Vec2 eval_metres(const Point3& p) const;
};

/// One sine-product mode of a scalar stream function. Indices must be >= 1.
struct StreamMode {
  LatticePoint m;
  double amplitude = 0.0;
};

/// Divergence-free truth field derived from a stream function on the unit
/// square: psi(t) = sum a * sin(pi m1 t1) * sin(pi m2 t2), velocity
/// (d psi / d t2, -d psi / d t1). The curl is taken in unit coordinates.
struct StreamFunctionField {
  std::vector<StreamMode> modes;
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);

  void validate() const;
  Vec2 eval_unit(const Vec2& unit) const;
  Vec2 eval_metres(const Point3& p) const;
};

/// Exact complex-exponential expansion of a stream-function field. The
/// result is conjugate-symmetric and evaluates identically (supports the
/// four sign combinations of each mode).
BandlimitedField to_bandlimited(const StreamFunctionField& field);

/// Real field value at a unit-square point.
inline Vec2 eval_field(const BandlimitedField& field, const Vec2& unit) {
  return field.eval_unit(unit);
}
inline Vec2 eval_field(const StreamFunctionField& field, const Vec2& unit) {
  return field.eval_unit(unit);
}

/// Station positions drawn uniformly over the rectangle
/// [origin, origin + tau], altitude zero.
std::vector<Point3> uniform_stations(std::size_t count, std::uint64_t seed,
                                     const Vec2& tau, const Vec2& origin);

/// Samples a field at fixed locations and adds iid N(0, sigma^2) noise to
/// each velocity component. Stations are named S00000, S00001, ... in input
/// order; sorting by id therefore preserves input order.
data::TimeSlice sample_slice(const BandlimitedField& field,
                             const std::vector<Point3>& locations,
                             double noise_sigma, std::uint64_t seed,
                             std::int64_t time = 0);
data::TimeSlice sample_slice(const StreamFunctionField& field,
                             const std::vector<Point3>& locations,
                             double noise_sigma, std::uint64_t seed,
                             std::int64_t time = 0);

}  // namespace windfield::synth
