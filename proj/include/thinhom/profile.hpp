#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "thinhom/errors.hpp"

namespace thinhom {

enum class ProfileKind { Constant, CosineSeries, PiecewiseLinear };

// One harmonic of a trigonometric series: amplitude * cos(2*pi*k*x/L) or the
// sine counterpart; k counts whole cycles per period.
struct Harmonic {
  double amplitude = 0.0;
  int k = 1;

  bool operator==(const Harmonic&) const = default;
};

// Periodic boundary profile with exact derivative, min, max and mean.
class Profile {
 public:
  static Profile constant(double value, double period = 1.0) {
    Profile p;
    p.kind_ = ProfileKind::Constant;
    p.period_ = period;
    p.base_ = value;
    p.validate_common();
    p.min_ = p.max_ = p.mean_ = value;
    return p;
  }

  static Profile cosine_series(double base, std::vector<Harmonic> cos_terms,
                               std::vector<Harmonic> sin_terms, double period = 1.0) {
    Profile p;
    p.kind_ = ProfileKind::CosineSeries;
    p.period_ = period;
    p.base_ = base;
    p.cos_terms_ = std::move(cos_terms);
    p.sin_terms_ = std::move(sin_terms);
    p.validate_common();
    for (const auto& t : p.cos_terms_) {
      if (t.k < 1) throw ArgumentError("Profile: harmonic index must be >= 1");
    }
    for (const auto& t : p.sin_terms_) {
      if (t.k < 1) throw ArgumentError("Profile: harmonic index must be >= 1");
    }
    p.mean_ = base;
    p.compute_trig_extrema();
    return p;
  }

  static Profile piecewise_linear(std::vector<std::pair<double, double>> points, double period) {
    Profile p;
    p.kind_ = ProfileKind::PiecewiseLinear;
    p.period_ = period;
    p.points_ = std::move(points);
    p.validate_common();
    if (p.points_.size() < 2) {
      throw ArgumentError("Profile: piecewise-linear needs at least 2 points");
    }
    if (p.points_.front().first != 0.0) {
      throw ArgumentError("Profile: piecewise-linear must start at x = 0");
    }
    for (size_t i = 1; i < p.points_.size(); ++i) {
      if (!(p.points_[i].first > p.points_[i - 1].first)) {
        throw ArgumentError("Profile: piecewise-linear abscissae must increase");
      }
    }
    if (!(p.points_.back().first < period)) {
      throw ArgumentError("Profile: piecewise-linear abscissae must stay below the period");
    }
    p.compute_pwl_stats();
    return p;
  }

  double value(double x) const {
    switch (kind_) {
      case ProfileKind::Constant:
        return base_;
      case ProfileKind::CosineSeries: {
        double w = 2.0 * std::numbers::pi / period_;
        double v = base_;
        for (const auto& t : cos_terms_) v += t.amplitude * std::cos(w * t.k * x);
        for (const auto& t : sin_terms_) v += t.amplitude * std::sin(w * t.k * x);
        return v;
      }
      case ProfileKind::PiecewiseLinear:
        return pwl_value(wrap(x));
    }
    return base_;
  }

  double derivative(double x) const {
    switch (kind_) {
      case ProfileKind::Constant:
        return 0.0;
      case ProfileKind::CosineSeries: {
        double w = 2.0 * std::numbers::pi / period_;
        double v = 0.0;
        for (const auto& t : cos_terms_) v -= t.amplitude * w * t.k * std::sin(w * t.k * x);
        for (const auto& t : sin_terms_) v += t.amplitude * w * t.k * std::cos(w * t.k * x);
        return v;
      }
      case ProfileKind::PiecewiseLinear:
        throw ArgumentError("Profile: piecewise-linear derivative is discontinuous");
    }
    return 0.0;
  }

  bool has_continuous_derivative() const { return kind_ != ProfileKind::PiecewiseLinear; }

  ProfileKind kind() const { return kind_; }
  double period() const { return period_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double mean() const { return mean_; }
  bool is_constant() const { return min_ == max_; }

  // Descriptor access for config round-trips.
  double base() const { return base_; }
  const std::vector<Harmonic>& cos_terms() const { return cos_terms_; }
  const std::vector<Harmonic>& sin_terms() const { return sin_terms_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  bool operator==(const Profile&) const = default;

 private:
  Profile() = default;

  void validate_common() const {
    if (!(period_ > 0.0) || !std::isfinite(period_)) {
      throw ArgumentError("Profile: period must be positive and finite");
    }
    if (!std::isfinite(base_)) throw ArgumentError("Profile: non-finite value");
    for (const auto& t : cos_terms_) {
      if (!std::isfinite(t.amplitude)) throw ArgumentError("Profile: non-finite amplitude");
    }
    for (const auto& t : sin_terms_) {
      if (!std::isfinite(t.amplitude)) throw ArgumentError("Profile: non-finite amplitude");
    }
    for (const auto& pt : points_) {
      if (!std::isfinite(pt.first) || !std::isfinite(pt.second)) {
        throw ArgumentError("Profile: non-finite point");
      }
    }
  }

  double wrap(double x) const {
    double t = std::fmod(x, period_);
    if (t < 0.0) t += period_;
    return t;
  }

  double pwl_value(double t) const {
    // t in [0, period); the last segment wraps to (period, y0).
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const std::pair<double, double>& p) {
                                 return v < p.first;
                               });
    size_t i = static_cast<size_t>(it - points_.begin());
    double xa, ya, xb, yb;
    if (i == 0) {
      return points_.front().second;
    }
    xa = points_[i - 1].first;
    ya = points_[i - 1].second;
    if (i == points_.size()) {
      xb = period_;
      yb = points_.front().second;
    } else {
      xb = points_[i].first;
      yb = points_[i].second;
    }
    double s = (t - xa) / (xb - xa);
    return ya + s * (yb - ya);
  }

  void compute_pwl_stats() {
    min_ = max_ = points_.front().second;
    for (const auto& pt : points_) {
      min_ = std::min(min_, pt.second);
      max_ = std::max(max_, pt.second);
    }
    double area = 0.0;
    for (size_t i = 0; i < points_.size(); ++i) {
      double xa = points_[i].first;
      double ya = points_[i].second;
      double xb = (i + 1 < points_.size()) ? points_[i + 1].first : period_;
      double yb = (i + 1 < points_.size()) ? points_[i + 1].second : points_.front().second;
      area += 0.5 * (ya + yb) * (xb - xa);
    }
    mean_ = area / period_;
  }

  void compute_trig_extrema() {
    size_t n_terms = cos_terms_.size() + sin_terms_.size();
    if (n_terms == 0) {
      min_ = max_ = base_;
      return;
    }
    if (n_terms == 1) {
      double a = cos_terms_.empty() ? sin_terms_[0].amplitude : cos_terms_[0].amplitude;
      min_ = base_ - std::abs(a);
      max_ = base_ + std::abs(a);
      return;
    }
    // General series: bracket the roots of the derivative on a dense grid,
    // bisect, and take extrema over the critical points.
    int kmax = 1;
    for (const auto& t : cos_terms_) kmax = std::max(kmax, t.k);
    for (const auto& t : sin_terms_) kmax = std::max(kmax, t.k);
    int n = std::max(1024, 256 * kmax);
    double lo = value(0.0), hi = lo;
    double prev_x = 0.0, prev_d = derivative(0.0);
    for (int i = 1; i <= n; ++i) {
      double x = period_ * static_cast<double>(i) / n;
      double d = derivative(x);
      lo = std::min(lo, value(x));
      hi = std::max(hi, value(x));
      if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
        double a = prev_x, b = x, da = prev_d;
        for (int it = 0; it < 80; ++it) {
          double m = 0.5 * (a + b);
          double dm = derivative(m);
          if ((da < 0.0) == (dm < 0.0)) {
            a = m;
            da = dm;
          } else {
            b = m;
          }
        }
        double v = value(0.5 * (a + b));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      prev_x = x;
      prev_d = d;
    }
    min_ = lo;
    max_ = hi;
  }

  ProfileKind kind_ = ProfileKind::Constant;
  double period_ = 1.0;
  double base_ = 0.0;
  std::vector<Harmonic> cos_terms_;
  std::vector<Harmonic> sin_terms_;
  std::vector<std::pair<double, double>> points_;
  double min_ = 0.0;
  double max_ = 0.0;
  double mean_ = 0.0;
};

}  // namespace thinhom
