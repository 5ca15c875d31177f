#pragma once

#include <cmath>
#include <utility>

#include "thinhom/errors.hpp"
#include "thinhom/profile.hpp"

namespace thinhom {

// Oscillating strip {0 < x1 < 1, -h(x1/eps^alpha) < x2 < g(x1/eps)}.
struct ThinDomainSpec {
  ThinDomainSpec(double epsilon, double alpha, Profile g, Profile h)
      : epsilon(epsilon), alpha(alpha), g(std::move(g)), h(std::move(h)) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw ArgumentError("ThinDomainSpec: epsilon must lie in (0, 1)");
    }
    if (!(alpha > 1.0)) throw ArgumentError("ThinDomainSpec: alpha must be > 1");
    if (!(this->g.min() > 0.0)) {
      throw ArgumentError("ThinDomainSpec: the upper profile must be strictly positive");
    }
    if (this->h.min() < 0.0) {
      throw ArgumentError("ThinDomainSpec: the lower profile must be nonnegative");
    }
  }

  double epsilon;
  double alpha;
  Profile g;
  Profile h;
};

inline double upper_boundary(const ThinDomainSpec& s, double x1) {
  if (x1 < 0.0 || x1 > 1.0) throw ArgumentError("upper_boundary: x1 outside [0, 1]");
  return s.g.value(x1 / s.epsilon);
}

inline double lower_boundary(const ThinDomainSpec& s, double x1) {
  if (x1 < 0.0 || x1 > 1.0) throw ArgumentError("lower_boundary: x1 outside [0, 1]");
  return -s.h.value(x1 / std::pow(s.epsilon, s.alpha));
}

// One period of the upper profile over a flat floor at -h0.
struct CellSpec {
  CellSpec(Profile g, double h0) : g(std::move(g)), h0(h0) {
    if (!(this->g.min() > 0.0)) {
      throw ArgumentError("CellSpec: the upper profile must be strictly positive");
    }
    if (h0 < 0.0) throw ArgumentError("CellSpec: floor depth must be nonnegative");
    if (!this->g.has_continuous_derivative()) {
      throw ArgumentError("CellSpec: the upper profile needs a continuous derivative");
    }
  }

  Profile g;
  double h0;

  double L1() const { return g.period(); }
  double height() const { return g.max() + h0; }
};

// Thin rectangle (-eps^alpha, eps^alpha) x (0, 1) with data on the bottom edge.
struct RectangleSpec {
  RectangleSpec(double epsilon, double alpha) : epsilon(epsilon), alpha(alpha) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw ArgumentError("RectangleSpec: epsilon must lie in (0, 1)");
    }
    if (!(alpha > 1.0)) throw ArgumentError("RectangleSpec: alpha must be > 1");
    if (!(half_width() < 1.0)) throw ArgumentError("RectangleSpec: half-width must be < 1");
  }

  double epsilon;
  double alpha;

  double half_width() const { return std::pow(epsilon, alpha); }
  double area() const { return 2.0 * half_width(); }
};

}  // namespace thinhom
