#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "thinhom/domain.hpp"
#include "thinhom/errors.hpp"
#include "thinhom/numerics.hpp"

namespace thinhom {

// Fiber integral of the forcing over each vertical section of the oscillating
// domain, tabulated on a uniform horizontal grid (8-point Gauss per fiber).
inline Tabulated compute_fhat(const ThinDomainSpec& spec,
                              const std::function<double(double, double)>& f, int m) {
  if (m < 8) throw ArgumentError("compute_fhat: need at least 8 samples");
  const auto& rule = gauss_rule(8);
  std::vector<double> xs = linspace(0.0, 1.0, m + 1);
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    double lo = lower_boundary(spec, xs[i]);
    double hi = upper_boundary(spec, xs[i]);
    double half = 0.5 * (hi - lo);
    double mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      acc += rule.weights[q] * f(xs[i], mid + half * rule.points[q]);
    }
    ys[i] = acc * half;
  }
  return Tabulated(std::move(xs), std::move(ys));
}

// Weak limit of the fiber integrals for a forcing that depends on x1 only:
// f_hat = (mean fiber length) * f, and the mean fiber length is the cell area
// ratio plus the floor correction.
inline double fhat_limit_coefficient(const Profile& g, const Profile& h) {
  return g.mean() + h.mean();
}

struct LimitProblem {
  double q_hat = 0.0;
  double mass_coeff = 0.0;
  Tabulated f_hat;
  int m = 256;
};

// 1D Neumann problem -q_hat u'' + mass_coeff u = f_hat on (0,1), P1 elements
// on a uniform grid, direct tridiagonal solve.
inline std::vector<double> solve_limit(const LimitProblem& prob) {
  if (prob.m < 8) throw ArgumentError("solve_limit: need at least 8 elements");
  if (!(prob.q_hat > 0.0)) throw ArgumentError("solve_limit: q_hat must be positive");
  if (!(prob.mass_coeff > 0.0)) throw ArgumentError("solve_limit: mass_coeff must be positive");
  if (prob.f_hat.empty()) throw ArgumentError("solve_limit: missing f_hat");

  int m = prob.m;
  double h = 1.0 / m;
  std::vector<double> lower(m, 0.0), diag(m + 1, 0.0), upper(m, 0.0), rhs(m + 1, 0.0);
  const auto& rule = gauss_rule(2);
  for (int e = 0; e < m; ++e) {
    double xa = h * e;
    double xb = (e + 1 == m) ? 1.0 : h * (e + 1);
    double k = prob.q_hat / h;
    double mm = prob.mass_coeff * h / 6.0;
    diag[e] += k + 2.0 * mm;
    diag[e + 1] += k + 2.0 * mm;
    lower[e] += -k + mm;
    upper[e] += -k + mm;
    double half = 0.5 * (xb - xa);
    double mid = 0.5 * (xa + xb);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double x = mid + half * rule.points[q];
      double w = rule.weights[q] * half * prob.f_hat(x);
      double pa = (xb - x) / (xb - xa);
      rhs[e] += w * pa;
      rhs[e + 1] += w * (1.0 - pa);
    }
  }
  return solve_tridiagonal(lower, diag, upper, rhs);
}

// Exact solution of the limit equation for forcing cos(k*pi*x): the Neumann
// conditions hold because the derivative carries sin(k*pi*x).
inline std::function<double(double)> analytic_limit_cosine(double q_hat, double mass_coeff,
                                                           int k) {
  if (k < 1) throw ArgumentError("analytic_limit_cosine: harmonic index must be >= 1");
  if (!(q_hat > 0.0) || !(mass_coeff > 0.0)) {
    throw ArgumentError("analytic_limit_cosine: coefficients must be positive");
  }
  double A = q_hat / mass_coeff;
  double kpi = k * std::numbers::pi;
  double amp = 1.0 / (1.0 + A * kpi * kpi);
  return [amp, kpi](double x) { return amp * std::cos(kpi * x); };
}

inline double l2_norm_1d(const std::vector<double>& u) {
  size_t m = u.size() - 1;
  double h = 1.0 / static_cast<double>(m);
  double acc = 0.0;
  for (size_t e = 0; e < m; ++e) {
    double a = u[e], b = u[e + 1];
    acc += h / 3.0 * (a * a + a * b + b * b);
  }
  return std::sqrt(std::max(acc, 0.0));
}

inline double l2_error_1d(const std::vector<double>& u,
                          const std::function<double(double)>& ref) {
  size_t m = u.size() - 1;
  double h = 1.0 / static_cast<double>(m);
  std::vector<double> diff(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    double x = (i == m) ? 1.0 : h * static_cast<double>(i);
    diff[i] = u[i] - ref(x);
  }
  return l2_norm_1d(diff);
}

// Sup-norm of the running integral of (sampled fiber integral - claimed weak
// limit); a direct check that the fiber integrals average out to the limit.
inline double primitive_gap(const Tabulated& fhat_eps, double limit_coeff,
                            const std::function<double(double)>& f) {
  const auto& xs = fhat_eps.xs();
  const auto& ys = fhat_eps.ys();
  double gap = 0.0, running = 0.0;
  for (size_t i = 1; i < xs.size(); ++i) {
    double da = ys[i - 1] - limit_coeff * f(xs[i - 1]);
    double db = ys[i] - limit_coeff * f(xs[i]);
    running += 0.5 * (da + db) * (xs[i] - xs[i - 1]);
    gap = std::max(gap, std::abs(running));
  }
  return gap;
}

}  // namespace thinhom
