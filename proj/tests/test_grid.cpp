#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rollwave/grid.hpp"

#include <numbers>
#include <random>

using namespace rollwave;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field random_smooth(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Field f = Field::Zero(g.size());
  Field y = g.nodes();
  for (int m = 1; m <= 6; ++m) {
    double a = dist(rng), b = dist(rng);
    f += a * (kTwoPi * m * y).cos() + b * (kTwoPi * m * y).sin();
  }
  return f;
}
}  // namespace

TEST_CASE("derivative of constant is zero") {
  Grid g(64);
  Field one = Field::Ones(64);
  CHECK(g.diff(one, 1).abs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("derivative of sin(2 pi y)") {
  Grid g(64);
  Field y = g.nodes();
  Field f = (kTwoPi * y).sin();
  Field expect = kTwoPi * (kTwoPi * y).cos();
  CHECK((g.diff(f, 1) - expect).abs().maxCoeff() < 1e-12);
}

TEST_CASE("mean of derivative vanishes for random smooth fields") {
  Grid g(128);
  for (unsigned s : {1u, 2u, 3u}) {
    Field f = random_smooth(g, s);
    CHECK(std::abs(Grid::mean(g.diff(f, 1))) < 1e-12);
  }
}

TEST_CASE("antiderivative basics") {
  Grid g(64);
  Field zero = Field::Zero(64);
  auto a0 = g.antiderivative(zero);
  CHECK(a0.ramp == 0.0);
  CHECK(a0.periodic.abs().maxCoeff() < 1e-15);

  Field one = Field::Ones(64);
  auto a1 = g.antiderivative(one);
  CHECK(a1.ramp == doctest::Approx(1.0));
  CHECK(a1.periodic.abs().maxCoeff() < 1e-14);

  Field y = g.nodes();
  Field f = (kTwoPi * y).cos();
  auto a = g.antiderivative(f);
  Field expect = (kTwoPi * y).sin() / kTwoPi;
  CHECK(a.ramp == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((a.periodic - expect).abs().maxCoeff() < 1e-13);
}

TEST_CASE("mean is exact on products of harmonics") {
  Grid g(64);
  Field y = g.nodes();
  CHECK(std::abs(Grid::mean(Field((kTwoPi * y).sin()))) < 1e-14);
  Field c = (kTwoPi * y).cos();
  CHECK(Grid::mean(Field(c * c)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("diff then antiderivative round trip on mean-zero fields") {
  Grid g(64);
  Field f = random_smooth(g, 7);
  f -= f.mean();
  auto a = g.antiderivative(f);
  CHECK(std::abs(a.ramp) < 1e-14);
  Field back = g.diff(a.periodic, 1);
  CHECK((back - f).abs().maxCoeff() < 1e-10);
}

TEST_CASE("Parseval") {
  Grid g(128);
  Field f = random_smooth(g, 11);
  CField c = g.spectrum(f);
  double phys = (f * f).sum() / f.size();
  double spec = c.abs2().sum();
  CHECK(phys == doctest::Approx(spec).epsilon(1e-12));
}

TEST_CASE("trig interpolation hits nodes and off-grid values") {
  Grid g(64);
  Field y = g.nodes();
  Field f = (kTwoPi * y).sin() + 0.3 * (2.0 * kTwoPi * y).cos();
  FieldSeries s(g, f);
  CHECK(s(0.25) == doctest::Approx(std::sin(kTwoPi * 0.25) +
                                   0.3 * std::cos(2 * kTwoPi * 0.25))
                       .epsilon(1e-12));
  CHECK(s.derivative(0.1) ==
        doctest::Approx(kTwoPi * std::cos(kTwoPi * 0.1) -
                        0.6 * kTwoPi * std::sin(2 * kTwoPi * 0.1))
            .epsilon(1e-12));
}

TEST_CASE("resample is a pure refinement") {
  Grid g(64);
  Field f = random_smooth(g, 3);
  Grid g2(128);
  Field f2 = g.resample(f, 128);
  // refined samples agree with the interpolant
  FieldSeries s(g, f);
  for (int i : {1, 17, 63, 101}) {
    CHECK(f2[i] == doctest::Approx(s(i / 128.0)).epsilon(1e-11));
  }
  // and downsampling recovers the original
  Field back = g2.resample(f2, 64);
  CHECK((back - f).abs().maxCoeff() < 1e-12);
}

TEST_CASE("non-finite input is rejected") {
  Grid g(16);
  Field f = Field::Zero(16);
  f[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(g.diff(f, 1), "non-finite field", NumericError);
}

TEST_CASE("grid size must be a power of two at least 16") {
  CHECK_THROWS_AS(Grid(12), RegimeError);
  CHECK_THROWS_AS(Grid(48), RegimeError);
  CHECK_NOTHROW(Grid(16));
}
