#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "thinhom/errors.hpp"

namespace thinhom {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

inline const GaussRule& gauss_rule(int n) {
  static const GaussRule g1{{0.0}, {2.0}};
  static const GaussRule g2{{-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}};
  static const GaussRule g3{{-0.7745966692414834, 0.0, 0.7745966692414834},
                            {0.5555555555555556, 0.8888888888888888, 0.5555555555555556}};
  static const GaussRule g4{{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                             0.8611363115940526},
                            {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                             0.3478548451374538}};
  static const GaussRule g5{{-0.9061798459386640, -0.5384693101056831, 0.0,
                             0.5384693101056831, 0.9061798459386640},
                            {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                             0.4786286704993665, 0.2369268850561891}};
  static const GaussRule g8{{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363},
                            {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763}};
  switch (n) {
    case 1: return g1;
    case 2: return g2;
    case 3: return g3;
    case 4: return g4;
    case 5: return g5;
    case 8: return g8;
    default: throw ArgumentError("gauss_rule: unsupported point count " + std::to_string(n));
  }
}

// Composite Gauss quadrature over uniform panels.
inline double integrate_panels(const std::function<double(double)>& f, double a, double b,
                               int panels, int rule_points = 5) {
  if (panels < 1) throw ArgumentError("integrate_panels: need at least 1 panel");
  const GaussRule& rule = gauss_rule(rule_points);
  double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double mid = a + (p + 0.5) * h;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      acc += rule.weights[q] * f(mid + 0.5 * h * rule.points[q]);
    }
  }
  return acc * 0.5 * h;
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw ArgumentError("linspace: need at least 2 points");
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  xs.back() = b;
  return xs;
}

// Piecewise-linear interpolant of sampled data; clamped outside the sample range.
class Tabulated {
 public:
  Tabulated() = default;

  Tabulated(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2) {
      throw ArgumentError("Tabulated: need matching x/y arrays with at least 2 samples");
    }
    for (size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) {
        throw ArgumentError("Tabulated: abscissae must be strictly increasing");
      }
    }
  }

  bool empty() const { return x_.empty(); }

  double operator()(double x) const {
    if (empty()) throw ArgumentError("Tabulated: evaluating an empty table");
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    size_t i = static_cast<size_t>(it - x_.begin());
    double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return y_[i - 1] + t * (y_[i] - y_[i - 1]);
  }

  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

// Thomas algorithm; overwrites nothing, returns the solution.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs) {
  size_t n = diag.size();
  if (n == 0 || lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n) {
    throw ArgumentError("solve_tridiagonal: inconsistent band sizes");
  }
  std::vector<double> c(n - 1), d(n);
  double denom = diag[0];
  if (denom == 0.0) throw ArgumentError("solve_tridiagonal: zero pivot");
  if (n > 1) c[0] = upper[0] / denom;
  d[0] = rhs[0] / denom;
  for (size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i - 1] * c[i - 1];
    if (denom == 0.0) throw ArgumentError("solve_tridiagonal: zero pivot");
    if (i < n - 1) c[i] = upper[i] / denom;
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
  }
  for (size_t i = n - 1; i-- > 0;) {
    d[i] -= c[i] * d[i + 1];
  }
  return d;
}

// Least-squares slope of log(y) against log(x); all entries must be positive.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ArgumentError("fit_loglog_slope: need at least 2 matching samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      throw ArgumentError("fit_loglog_slope: samples must be positive");
    }
    double lx = std::log(x[i]);
    double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(x.size());
  double det = n * sxx - sx * sx;
  if (det == 0.0) throw ArgumentError("fit_loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / det;
}

struct RichardsonResult {
  double value = 0.0;
  double error_bar = 0.0;
};

// Extrapolates a pair of values at mesh spacings h and h/2 assuming the given
// convergence rate.
inline RichardsonResult richardson(double coarse, double fine, double rate = 2.0) {
  double factor = std::pow(2.0, rate) - 1.0;
  double correction = (fine - coarse) / factor;
  return {fine + correction, std::abs(correction)};
}

}  // namespace thinhom
