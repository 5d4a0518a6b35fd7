#include "windfield/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "windfield/errors.hpp"
#include "windfield/rng.hpp"

namespace windfield::synth {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_domain(const Vec2& tau, const Vec2& origin) {
  if (!(tau.x() > 0.0) || !(tau.y() > 0.0) || !tau.allFinite() ||
      !origin.allFinite()) {
    throw ConfigError("field domain requires positive finite tau and finite "
                      "origin");
  }
}

template <typename Field>
data::TimeSlice sample_impl(const Field& field,
                            const std::vector<Point3>& locations,
                            double noise_sigma, std::uint64_t seed,
                            std::int64_t time) {
  field.validate();
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise sigma must be finite and non-negative");
  }
  if (locations.empty()) {
    throw DataError("sample_slice needs at least one location");
  }
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  data::TimeSlice slice;
  slice.time = time;
  slice.station_ids.reserve(locations.size());
  slice.points.reserve(locations.size());
  slice.velocities.reserve(locations.size());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "S%05zu", i);
    Vec2 v = field.eval_metres(locations[i]);
    if (noise_sigma > 0.0) {
      v.x() += noise_sigma * gauss(rng);
      v.y() += noise_sigma * gauss(rng);
    }
    slice.station_ids.emplace_back(name);
    slice.points.push_back(locations[i]);
    slice.velocities.push_back(v);
  }
  return slice;
}

}  // namespace

void BandlimitedField::validate() const {
  check_domain(tau, origin);
  if (support.size() != coeffs.size()) {
    throw ConfigError("bandlimited field needs one coefficient pair per "
                      "support point");
  }
  for (const auto& c : coeffs) {
    if (!c.allFinite()) throw ConfigError("non-finite field coefficient");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = i + 1; j < support.size(); ++j) {
      if (support[i] == support[j]) {
        throw ConfigError("duplicate support point in bandlimited field");
      }
    }
  }
}

bool BandlimitedField::conjugate_symmetric(double tol) const {
  for (std::size_t i = 0; i < support.size(); ++i) {
    const LatticePoint neg{-support[i].m1, -support[i].m2};
    bool found = false;
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (support[j] == neg) {
        if ((coeffs[j] - coeffs[i].conjugate()).norm() > tol) return false;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Vec2c BandlimitedField::eval_complex_unit(const Vec2& unit) const {
  Vec2c sum = Vec2c::Zero();
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double phase =
        kPi * (support[k].m1 * unit.x() + support[k].m2 * unit.y());
    sum += coeffs[k] * std::polar(1.0, phase);
  }
  return sum;
}

Vec2 BandlimitedField::eval_unit(const Vec2& unit) const {
  const Vec2c value = eval_complex_unit(unit);
  return Vec2(value.x().real(), value.y().real());
}

Vec2 BandlimitedField::eval_metres(const Point3& p) const {
  return eval_unit(data::rescale_to_unit(Vec2(p.x, p.y), tau, origin));
}

void StreamFunctionField::validate() const {
  check_domain(tau, origin);
  for (const auto& mode : modes) {
    if (mode.m.m1 < 1 || mode.m.m2 < 1) {
      throw ConfigError("stream modes need indices >= 1");
    }
    if (!std::isfinite(mode.amplitude)) {
      throw ConfigError("non-finite stream mode amplitude");
    }
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i].m == modes[j].m) {
        throw ConfigError("duplicate stream mode");
      }
    }
  }
}

Vec2 StreamFunctionField::eval_unit(const Vec2& unit) const {
  double u = 0.0, v = 0.0;
  for (const auto& mode : modes) {
    const double a1 = kPi * mode.m.m1;
    const double a2 = kPi * mode.m.m2;
    u += mode.amplitude * a2 * std::sin(a1 * unit.x()) *
         std::cos(a2 * unit.y());
    v -= mode.amplitude * a1 * std::cos(a1 * unit.x()) *
         std::sin(a2 * unit.y());
  }
  return Vec2(u, v);
}

Vec2 StreamFunctionField::eval_metres(const Point3& p) const {
  return eval_unit(data::rescale_to_unit(Vec2(p.x, p.y), tau, origin));
}

BandlimitedField to_bandlimited(const StreamFunctionField& field) {
  field.validate();
  // sin(a)sin(b) = (cos(a-b) - cos(a+b)) / 2 expands each mode onto the four
  // sign combinations with stream coefficients -a/4, a/4, a/4, -a/4; the
  // velocity coefficient at lattice point p is psi_hat(p) * (i pi p2, -i pi p1).
  std::map<LatticePoint, Complex> psi_hat;
  for (const auto& mode : field.modes) {
    const double q = mode.amplitude / 4.0;
    psi_hat[{mode.m.m1, mode.m.m2}] += -q;
    psi_hat[{-mode.m.m1, -mode.m.m2}] += -q;
    psi_hat[{mode.m.m1, -mode.m.m2}] += q;
    psi_hat[{-mode.m.m1, mode.m.m2}] += q;
  }
  BandlimitedField out;
  out.tau = field.tau;
  out.origin = field.origin;
  out.support.reserve(psi_hat.size());
  out.coeffs.reserve(psi_hat.size());
  const Complex i_pi(0.0, kPi);
  for (const auto& [p, psi] : psi_hat) {
    out.support.push_back(p);
    out.coeffs.push_back(
        Vec2c(psi * i_pi * static_cast<double>(p.m2),
              -psi * i_pi * static_cast<double>(p.m1)));
  }
  return out;
}

std::vector<Point3> uniform_stations(std::size_t count, std::uint64_t seed,
                                     const Vec2& tau, const Vec2& origin) {
  check_domain(tau, origin);
  if (count == 0) throw ConfigError("station count must be positive");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = origin.x() + tau.x() * unit(rng);
    const double y = origin.y() + tau.y() * unit(rng);
    out.push_back(Point3{x, y, 0.0});
  }
  return out;
}

data::TimeSlice sample_slice(const BandlimitedField& field,
                             const std::vector<Point3>& locations,
                             double noise_sigma, std::uint64_t seed,
                             std::int64_t time) {
  return sample_impl(field, locations, noise_sigma, seed, time);
}

data::TimeSlice sample_slice(const StreamFunctionField& field,
                             const std::vector<Point3>& locations,
                             double noise_sigma, std::uint64_t seed,
                             std::int64_t time) {
  return sample_impl(field, locations, noise_sigma, seed, time);
}

}  // namespace windfield::synth
