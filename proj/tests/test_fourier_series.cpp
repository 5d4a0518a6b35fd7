#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "support/test_support.hpp"
#include "windfield/errors.hpp"
#include "windfield/fourier_series.hpp"
#include "windfield/rng.hpp"
#include "windfield/synthetic.hpp"

using namespace windfield;

TEST_CASE("grid lattice: sizes and row-major enumeration") {
  const auto g0 = fourier::grid_lattice(0);
  REQUIRE(g0.size() == 1);
  CHECK(g0[0].m1 == 0);
  CHECK(g0[0].m2 == 0);

  const auto g1 = fourier::grid_lattice(1);
  REQUIRE(g1.size() == 9);
  CHECK(g1.front().m1 == -1);
  CHECK(g1.front().m2 == -1);
  CHECK(g1[1].m1 == -1);
  CHECK(g1[1].m2 == 0);
  CHECK(g1.back().m1 == 1);
  CHECK(g1.back().m2 == 1);

  CHECK(fourier::grid_lattice(10).size() == 441);

  // Every |m|,|n| <= M pair appears exactly once.
  const auto g2 = fourier::grid_lattice(2);
  REQUIRE(g2.size() == 25);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      const auto hits = std::count_if(
          g2.begin(), g2.end(),
          [&](const LatticePoint& m) { return m.m1 == a && m.m2 == b; });
      CHECK(hits == 1);
    }
  CHECK_THROWS_AS(fourier::grid_lattice(-1), ConfigError);
}

TEST_CASE("M=0 reduces to the shrunken-mean constant model") {
  const std::vector<Point3> pts = {{0.1, 0.2, 0}, {0.6, 0.9, 0},
                                   {0.4, 0.5, 0}};
  const std::vector<Vec2> vel = {Vec2(2, 1), Vec2(0, -1), Vec2(4, 3)};
  const data::TimeSlice slice = testsupport::make_slice(pts, vel);
  fourier::FourierOptions opt;
  opt.grid_m = 0;
  opt.loss.lambda = 0.5;
  opt.loss.eta = 0.0;
  const auto model = fourier::train_fourier_series(slice, opt);
  const Vec2 mean = (vel[0] + vel[1] + vel[2]) / 3.0;
  const Vec2 got = model.predict(Point3{0.77, 0.33, 0});
  CHECK(got.x() == doctest::Approx(mean.x() / 1.5).epsilon(1e-12));
  CHECK(got.y() == doctest::Approx(mean.y() / 1.5).epsilon(1e-12));
}

TEST_CASE("training delegates to the spectral solve on the full grid") {
  const testsupport::RandomInstance inst = testsupport::random_instance(71);
  std::vector<Point3> pts;
  for (const Vec2& p : inst.unit_points) pts.push_back({p.x(), p.y(), 0.0});
  const data::TimeSlice slice = testsupport::make_slice(pts, inst.velocities);

  fourier::FourierOptions opt;
  opt.grid_m = 2;
  opt.loss = inst.params;
  const auto model = fourier::train_fourier_series(slice, opt);
  const auto direct = spectral::fit_spectral_model(
      slice, fourier::grid_lattice(2), inst.params, opt.tau, opt.origin);
  REQUIRE(model.beta().size() == 25);
  for (std::size_t k = 0; k < 25; ++k) {
    CHECK(model.lattice()[k].m1 == direct.lattice()[k].m1);
    CHECK(model.lattice()[k].m2 == direct.lattice()[k].m2);
    CHECK(model.beta()[k].x() == direct.beta()[k].x());
    CHECK(model.beta()[k].y() == direct.beta()[k].y());
  }
}

TEST_CASE("recovers a band-limited field inside the grid") {
  synth::StreamFunctionField truth;
  truth.tau = Vec2(1, 1);
  truth.modes.push_back(synth::StreamMode{LatticePoint{1, 1}, 0.8});
  const auto stations =
      synth::uniform_stations(200, 3, Vec2(1, 1), Vec2(0, 0));
  const data::TimeSlice slice = synth::sample_slice(truth, stations, 0.0, 9, 0);

  fourier::FourierOptions opt;
  opt.grid_m = 1;
  opt.loss.lambda = 1e-10;
  opt.loss.eta = 0.0;
  const auto model = fourier::train_fourier_series(slice, opt);
  const auto held = synth::uniform_stations(50, 5, Vec2(1, 1), Vec2(0, 0));
  for (const auto& q : held)
    CHECK((truth.eval_metres(q) - model.predict(q)).norm() <= 1e-6);
}

TEST_CASE("real data gives real predictions on the symmetric grid") {
  auto rng = make_rng(808);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Point3> pts;
  std::vector<Vec2> vel;
  for (int i = 0; i < 40; ++i) {
    pts.push_back({unif(rng), unif(rng), 0.0});
    vel.emplace_back(n01(rng), n01(rng));
  }
  fourier::FourierOptions opt;
  opt.grid_m = 2;
  const auto model =
      fourier::train_fourier_series(testsupport::make_slice(pts, vel), opt);
  for (int i = 0; i < 50; ++i) {
    const Vec2c c = model.eval_complex_unit(Vec2(unif(rng), unif(rng)));
    const double mag = std::abs(c.x()) + std::abs(c.y());
    CHECK(std::abs(c.x().imag()) <= 1e-9 * (1.0 + mag));
    CHECK(std::abs(c.y().imag()) <= 1e-9 * (1.0 + mag));
  }
}

TEST_CASE("unpenalized training loss is monotone in grid size") {
  auto rng = make_rng(2112);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Point3> pts;
  std::vector<Vec2> vel;
  std::vector<Vec2> unit;
  for (int i = 0; i < 60; ++i) {
    const double x = unif(rng), y = unif(rng);
    pts.push_back({x, y, 0.0});
    unit.emplace_back(x, y);
    vel.emplace_back(n01(rng), n01(rng));
  }
  const data::TimeSlice slice = testsupport::make_slice(pts, vel);
  spectral::LossParams free_fit;
  free_fit.lambda = 0.0;
  free_fit.eta = 0.0;
  double prev = -1.0;
  for (int m = 0; m <= 3; ++m) {
    fourier::FourierOptions opt;
    opt.grid_m = m;
    opt.loss = free_fit;
    const auto model = fourier::train_fourier_series(slice, opt);
    const double loss = spectral::empirical_loss(model.lattice(), model.beta(),
                                                 unit, vel, free_fit);
    if (m > 0) CHECK(loss <= prev + 1e-10 * (1.0 + prev));
    prev = loss;
  }
}

TEST_CASE("fit is invariant to frequency enumeration order") {
  const testsupport::RandomInstance inst = testsupport::random_instance(314);
  std::vector<Point3> pts;
  for (const Vec2& p : inst.unit_points) pts.push_back({p.x(), p.y(), 0.0});
  const data::TimeSlice slice = testsupport::make_slice(pts, inst.velocities);
  spectral::LossParams p;
  p.lambda = 0.01;
  p.eta = 0.001;

  auto lattice = fourier::grid_lattice(2);
  auto shuffled = lattice;
  std::shuffle(shuffled.begin(), shuffled.end(), make_rng(5));
  const auto a =
      spectral::fit_spectral_model(slice, lattice, p, Vec2(1, 1), Vec2(0, 0));
  const auto b =
      spectral::fit_spectral_model(slice, shuffled, p, Vec2(1, 1), Vec2(0, 0));
  auto rng = make_rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(unif(rng), unif(rng));
    const Vec2 va = a.eval_unit(x);
    const Vec2 vb = b.eval_unit(x);
    CHECK((va - vb).norm() <= 1e-9 * (1.0 + va.norm()));
  }
}

TEST_CASE("empty slices are rejected") {
  fourier::FourierOptions opt;
  opt.grid_m = 1;
  CHECK_THROWS_AS(fourier::train_fourier_series(data::TimeSlice{}, opt),
                  DataError);
}
