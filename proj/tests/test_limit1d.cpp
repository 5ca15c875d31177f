#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "thinhom/limit1d.hpp"

using namespace thinhom;

namespace {

constexpr double kPi = std::numbers::pi;

ThinDomainSpec flat_strip(double eps) {
  return ThinDomainSpec(eps, 1.5, Profile::constant(1.0), Profile::constant(0.5));
}

Tabulated cosine_fhat(int m) {
  ThinDomainSpec spec(0.1, 1.5, Profile::constant(1.0), Profile::constant(0.0));
  return compute_fhat(spec, [](double x, double) { return std::cos(kPi * x); }, m);
}

}  // namespace

TEST_CASE("fiber integrals on a flat strip", "[limit1d]") {
  auto spec = flat_strip(0.1);

  SECTION("unit forcing gives the fiber length") {
    auto fhat = compute_fhat(spec, [](double, double) { return 1.0; }, 16);
    for (double x : {0.0, 0.3, 1.0}) CHECK(fhat(x) == Catch::Approx(1.5).epsilon(1e-12));
  }

  SECTION("linear-in-x2 forcing integrates exactly") {
    auto fhat = compute_fhat(spec, [](double, double y) { return y; }, 16);
    CHECK(fhat(0.5) == Catch::Approx(0.375).epsilon(1e-12));
  }

  SECTION("too few samples are rejected") {
    CHECK_THROWS_AS(compute_fhat(spec, [](double, double) { return 1.0; }, 4), ArgumentError);
  }
}

TEST_CASE("fiber integrals follow the oscillating roof", "[limit1d]") {
  auto g = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  ThinDomainSpec spec(0.25, 2.0, g, Profile::constant(0.0));
  auto fhat = compute_fhat(spec, [](double, double) { return 1.0; }, 16);
  CHECK(fhat(1.0 / 16.0) == Catch::Approx(1.5).epsilon(1e-12));
  CHECK(fhat(0.25) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weak limit coefficient is the mean fiber length", "[limit1d]") {
  auto g = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  auto h = Profile::cosine_series(1.0, {{1.0, 1}}, {});
  CHECK(fhat_limit_coefficient(g, h) == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(fhat_limit_coefficient(Profile::constant(1.0), Profile::constant(0.5)) ==
        Catch::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("constant forcing balanced by the mass term", "[limit1d]") {
  LimitProblem prob;
  prob.q_hat = 0.7;
  prob.mass_coeff = 2.0;
  prob.m = 64;
  std::vector<double> xs = linspace(0.0, 1.0, prob.m + 1);
  std::vector<double> ys(xs.size(), 1.5);
  prob.f_hat = Tabulated(xs, ys);
  auto u = solve_limit(prob);
  REQUIRE(u.size() == static_cast<size_t>(prob.m + 1));
  for (double v : u) CHECK(v == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("limit solver converges at second order for cosine forcing", "[limit1d]") {
  auto exact = analytic_limit_cosine(1.0, 1.0, 1);

  std::vector<double> hs, errs;
  for (int m : {64, 128, 256}) {
    LimitProblem prob;
    prob.q_hat = 1.0;
    prob.mass_coeff = 1.0;
    prob.m = m;
    prob.f_hat = cosine_fhat(m);
    auto u = solve_limit(prob);
    hs.push_back(1.0 / m);
    errs.push_back(l2_error_1d(u, exact));
    if (m == 256) {
      double amp = 1.0 / (1.0 + kPi * kPi);
      CHECK(u.front() == Catch::Approx(amp).margin(1e-4));
      CHECK(u.back() == Catch::Approx(-amp).margin(1e-4));
    }
  }
  CHECK(fit_loglog_slope(hs, errs) >= 1.9);
}

TEST_CASE("limit solver is exactly linear in the forcing", "[limit1d]") {
  LimitProblem prob;
  prob.q_hat = 0.642;
  prob.mass_coeff = 2.0;
  prob.m = 128;
  prob.f_hat = cosine_fhat(prob.m);
  auto u1 = solve_limit(prob);

  std::vector<double> ys = prob.f_hat.ys();
  for (double& v : ys) v *= 2.0;
  prob.f_hat = Tabulated(prob.f_hat.xs(), ys);
  auto u2 = solve_limit(prob);

  REQUIRE(u1.size() == u2.size());
  for (size_t i = 0; i < u1.size(); ++i) CHECK(u2[i] == 2.0 * u1[i]);
}

TEST_CASE("limit solution obeys the maximum principle bound", "[limit1d]") {
  LimitProblem prob;
  prob.q_hat = 0.642;
  prob.mass_coeff = 2.0;
  prob.m = 64;
  std::vector<double> xs = linspace(0.0, 1.0, prob.m + 1);
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) ys[i] = 2.0 * std::cos(kPi * xs[i]);
  prob.f_hat = Tabulated(xs, ys);

  double h = 1.0 / prob.m;
  REQUIRE(h * h < 6.0 * prob.q_hat / prob.mass_coeff);
  auto u = solve_limit(prob);
  double bound = 2.0 / prob.mass_coeff;
  for (double v : u) CHECK(std::abs(v) <= bound + 1e-12);
}

TEST_CASE("limit solver validates its inputs", "[limit1d]") {
  LimitProblem prob;
  prob.q_hat = 1.0;
  prob.mass_coeff = 1.0;
  prob.m = 64;
  SECTION("missing forcing") { CHECK_THROWS_AS(solve_limit(prob), ArgumentError); }

  prob.f_hat = cosine_fhat(prob.m);
  SECTION("too few elements") {
    prob.m = 4;
    CHECK_THROWS_AS(solve_limit(prob), ArgumentError);
  }
  SECTION("nonpositive diffusion") {
    prob.q_hat = 0.0;
    CHECK_THROWS_AS(solve_limit(prob), ArgumentError);
  }
  SECTION("nonpositive mass") {
    prob.mass_coeff = -1.0;
    CHECK_THROWS_AS(solve_limit(prob), ArgumentError);
  }
  SECTION("bad harmonic index") { CHECK_THROWS_AS(analytic_limit_cosine(1.0, 1.0, 0), ArgumentError); }
}

TEST_CASE("discrete 1D norms match closed forms", "[limit1d]") {
  int m = 10;
  std::vector<double> u(m + 1);
  for (int i = 0; i <= m; ++i) u[i] = static_cast<double>(i) / m;
  CHECK(l2_norm_1d(u) == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(l2_error_1d(u, [](double x) { return x; }) < 1e-14);
}

TEST_CASE("primitives of the fiber-integral defect shrink with eps", "[limit1d]") {
  auto g = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  auto unit = [](double, double) { return 1.0; };
  double limit = fhat_limit_coefficient(g, Profile::constant(0.0));
  REQUIRE(limit == Catch::Approx(1.0).epsilon(1e-12));

  ThinDomainSpec coarse(0.1, 2.0, g, Profile::constant(0.0));
  ThinDomainSpec fine(0.05, 2.0, g, Profile::constant(0.0));
  double gap_coarse = primitive_gap(compute_fhat(coarse, unit, 2048), limit,
                                    [](double) { return 1.0; });
  double gap_fine = primitive_gap(compute_fhat(fine, unit, 2048), limit,
                                  [](double) { return 1.0; });

  CHECK(gap_coarse == Catch::Approx(0.1 / (2.0 * kPi)).epsilon(0.02));
  CHECK(gap_fine == Catch::Approx(0.05 / (2.0 * kPi)).epsilon(0.02));
  CHECK(gap_fine < 0.7 * gap_coarse);
}
