#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "thinhom/profile.hpp"

using namespace thinhom;

TEST_CASE("constant profile", "[profile]") {
  auto p = Profile::constant(1.5);
  CHECK(p.value(0.3) == 1.5);
  CHECK(p.derivative(10.0) == 0.0);
  CHECK(p.min() == 1.5);
  CHECK(p.max() == 1.5);
  CHECK(p.mean() == 1.5);
  CHECK(p.is_constant());
  CHECK(p.has_continuous_derivative());
}

TEST_CASE("single-harmonic series has closed-form extrema", "[profile]") {
  auto g = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  CHECK(g.value(0.25) == Catch::Approx(1.5).epsilon(1e-14));
  CHECK(g.min() == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(g.max() == Catch::Approx(1.5).epsilon(1e-14));
  CHECK(g.mean() == 1.0);
  CHECK_FALSE(g.is_constant());
  // derivative of 1 + 0.5 sin(2 pi x) is pi cos(2 pi x)
  CHECK(g.derivative(0.0) == Catch::Approx(M_PI).epsilon(1e-13));
  CHECK(g.derivative(0.25) == Catch::Approx(0.0).margin(1e-13));

  auto h = Profile::cosine_series(1.0, {{1.0, 1}}, {});
  CHECK(h.min() == Catch::Approx(0.0).margin(1e-14));
  CHECK(h.max() == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(h.value(0.5) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("multi-harmonic extrema located by bisection", "[profile]") {
  // 1 + 0.3 cos(2 pi x) + 0.2 sin(4 pi x): compare to a dense scan
  auto p = Profile::cosine_series(1.0, {{0.3, 1}}, {{0.2, 2}});
  double lo = 1e30, hi = -1e30;
  for (int i = 0; i < 200000; ++i) {
    double v = p.value(static_cast<double>(i) / 200000);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(p.min() == Catch::Approx(lo).margin(1e-9));
  CHECK(p.max() == Catch::Approx(hi).margin(1e-9));
  CHECK(p.min() <= lo + 1e-12);
  CHECK(p.max() >= hi - 1e-12);
}

TEST_CASE("non-unit period scales arguments", "[profile]") {
  auto p = Profile::cosine_series(2.0, {{1.0, 1}}, {}, 0.5);
  CHECK(p.period() == 0.5);
  CHECK(p.value(0.5) == Catch::Approx(3.0).epsilon(1e-14));
  CHECK(p.value(0.25) == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("piecewise-linear profile wraps periodically", "[profile]") {
  auto p = Profile::piecewise_linear({{0.0, 1.0}, {0.5, 2.0}}, 1.0);
  CHECK(p.value(0.25) == Catch::Approx(1.5));
  CHECK(p.value(0.75) == Catch::Approx(1.5));  // descending wrap segment
  CHECK(p.value(1.25) == Catch::Approx(1.5));
  CHECK(p.min() == 1.0);
  CHECK(p.max() == 2.0);
  CHECK(p.mean() == Catch::Approx(1.5));
  CHECK_FALSE(p.has_continuous_derivative());
  CHECK_THROWS_AS(p.derivative(0.1), ArgumentError);
}

TEST_CASE("profile constructors validate their inputs", "[profile]") {
  CHECK_THROWS_AS(Profile::constant(1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(Profile::cosine_series(1.0, {{0.5, 0}}, {}), ArgumentError);
  CHECK_THROWS_AS(Profile::piecewise_linear({{0.0, 1.0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Profile::piecewise_linear({{0.1, 1.0}, {0.5, 2.0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Profile::piecewise_linear({{0.0, 1.0}, {1.0, 2.0}}, 1.0), ArgumentError);
  CHECK_THROWS_AS(Profile::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}, 1.0), ArgumentError);
}

TEST_CASE("profiles compare by descriptor", "[profile]") {
  auto a = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  auto b = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  auto c = Profile::cosine_series(1.0, {}, {{0.25, 1}});
  CHECK(a == b);
  CHECK_FALSE(a == c);
}
