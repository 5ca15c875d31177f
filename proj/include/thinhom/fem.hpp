#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "thinhom/errors.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/numerics.hpp"
#include "thinhom/sparse.hpp"

namespace thinhom {

// Diagonal anisotropy (a11, a22) multiplying the two gradient components.
struct DiffusionTensor {
  double a11 = 1.0;
  double a22 = 1.0;
};

namespace detail {

struct ElementGeometry {
  double area;
  std::array<double, 3> gx;  // gradients of the three hat functions
  std::array<double, 3> gy;
};

inline ElementGeometry element_geometry(const Mesh& mesh, size_t t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.nodes[tri[0]];
  const auto& p1 = mesh.nodes[tri[1]];
  const auto& p2 = mesh.nodes[tri[2]];
  std::array<std::array<double, 2>, 3> d = {{{p2[0] - p1[0], p2[1] - p1[1]},
                                             {p0[0] - p2[0], p0[1] - p2[1]},
                                             {p1[0] - p0[0], p1[1] - p0[1]}}};
  double area = 0.5 * (d[2][0] * (-d[1][1]) - d[2][1] * (-d[1][0]));
  ElementGeometry g;
  g.area = area;
  for (int a = 0; a < 3; ++a) {
    g.gx[a] = -d[a][1] / (2.0 * area);
    g.gy[a] = d[a][0] / (2.0 * area);
  }
  return g;
}

}  // namespace detail

inline CsrMatrix assemble_stiffness(const Mesh& mesh, DiffusionTensor tensor = {}) {
  if (!(tensor.a11 > 0.0) || !(tensor.a22 > 0.0)) {
    throw ArgumentError("assemble_stiffness: tensor entries must be positive");
  }
  CsrBuilder builder(mesh.nodes.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto g = detail::element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double v = g.area * (tensor.a11 * g.gx[a] * g.gx[b] + tensor.a22 * g.gy[a] * g.gy[b]);
        builder.add(tri[a], tri[b], v);
      }
    }
  }
  return builder.build(true);
}

inline CsrMatrix assemble_mass(const Mesh& mesh) {
  CsrBuilder builder(mesh.nodes.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    double area = mesh.triangle_area(t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        builder.add(tri[a], tri[b], area / 12.0 * (a == b ? 2.0 : 1.0));
      }
    }
  }
  return builder.build(true);
}

// Line load on tagged edges, integrated against the horizontal coordinate:
// load_i = integral of density(x1) * phi_i dx1. The Neumann data on a graph
// boundary {x2 = g(x1)} enters this way because the normal-derivative density
// against the arclength measure reduces to -g'(x1) dx1.
inline std::vector<double> assemble_boundary_load(const Mesh& mesh, EdgeTag tag,
                                                  const std::function<double(double)>& density) {
  bool found = false;
  std::vector<double> load(mesh.nodes.size(), 0.0);
  const auto& rule = gauss_rule(2);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    found = true;
    double xa = mesh.nodes[e.a][0];
    double xb = mesh.nodes[e.b][0];
    if (xa == xb) continue;  // vertical edge: no horizontal extent
    double half = 0.5 * (xb - xa);
    double mid = 0.5 * (xa + xb);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double x = mid + half * rule.points[q];
      double w = density(x) * rule.weights[q] * half;
      double pa = (xb - x) / (xb - xa);
      load[e.a] += w * pa;
      load[e.b] += w * (1.0 - pa);
    }
  }
  if (!found) throw ArgumentError("assemble_boundary_load: no edges with the requested tag");
  return load;
}

inline void apply_dirichlet(CsrMatrix& A, std::vector<double>& b,
                            const std::vector<std::pair<size_t, double>>& constraints) {
  eliminate_dirichlet(A, b, constraints);
}

struct PeriodicReduction {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::vector<size_t> full_to_reduced;
  size_t n_reduced = 0;
};

// Master/slave elimination: slave unknowns are merged into their masters and
// the reduced operator stays symmetric.
inline PeriodicReduction apply_periodic(const CsrMatrix& A, const std::vector<double>& b,
                                        const std::vector<std::pair<int, int>>& pairs) {
  size_t n = A.size();
  if (b.size() != n) throw ArgumentError("apply_periodic: size mismatch");
  std::vector<int> master_of(n, -1);
  std::vector<char> is_master(n, 0);
  for (const auto& [master, slave] : pairs) {
    if (master < 0 || slave < 0 || static_cast<size_t>(master) >= n ||
        static_cast<size_t>(slave) >= n) {
      throw ArgumentError("apply_periodic: node out of range");
    }
    if (master == slave) throw ArgumentError("apply_periodic: node paired with itself");
    if (master_of[slave] != -1) throw ArgumentError("apply_periodic: duplicated slave node");
    master_of[slave] = master;
    is_master[master] = 1;
  }
  for (const auto& [master, slave] : pairs) {
    if (master_of[master] != -1) {
      throw ArgumentError("apply_periodic: master node is itself a slave");
    }
    if (is_master[slave]) throw ArgumentError("apply_periodic: slave node is itself a master");
  }

  PeriodicReduction red;
  red.full_to_reduced.assign(n, 0);
  size_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (master_of[i] == -1) red.full_to_reduced[i] = next++;
  }
  for (size_t i = 0; i < n; ++i) {
    if (master_of[i] != -1) red.full_to_reduced[i] = red.full_to_reduced[master_of[i]];
  }
  red.n_reduced = next;

  CsrBuilder builder(next);
  const auto& row_ptr = A.row_ptr();
  const auto& cols = A.cols();
  const auto& vals = A.vals();
  for (size_t i = 0; i < n; ++i) {
    size_t ri = red.full_to_reduced[i];
    for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      builder.add(ri, red.full_to_reduced[cols[k]], vals[k]);
    }
  }
  red.matrix = builder.build(A.symmetric());
  red.rhs.assign(next, 0.0);
  for (size_t i = 0; i < n; ++i) red.rhs[red.full_to_reduced[i]] += b[i];
  return red;
}

inline std::vector<double> expand_periodic(const PeriodicReduction& red,
                                           const std::vector<double>& xr) {
  if (xr.size() != red.n_reduced) throw ArgumentError("expand_periodic: size mismatch");
  std::vector<double> x(red.full_to_reduced.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = xr[red.full_to_reduced[i]];
  return x;
}

// Stiffness plus scaled mass in one assembly pass; the operator of the
// reaction-diffusion solves.
inline CsrMatrix assemble_stiffness_mass(const Mesh& mesh, DiffusionTensor tensor,
                                         double mass_coeff) {
  if (!(tensor.a11 > 0.0) || !(tensor.a22 > 0.0) || !(mass_coeff >= 0.0)) {
    throw ArgumentError("assemble_stiffness_mass: coefficients must be positive");
  }
  CsrBuilder builder(mesh.nodes.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto g = detail::element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double v = g.area * (tensor.a11 * g.gx[a] * g.gx[b] + tensor.a22 * g.gy[a] * g.gy[b]);
        v += mass_coeff * g.area / 12.0 * (a == b ? 2.0 : 1.0);
        builder.add(tri[a], tri[b], v);
      }
    }
  }
  return builder.build(true);
}

// Load vector of the interpolated forcing: b = M * f(nodes).
inline std::vector<double> assemble_mass_load(const Mesh& mesh,
                                              const std::function<double(double, double)>& f) {
  std::vector<double> fn(mesh.nodes.size());
  for (size_t i = 0; i < fn.size(); ++i) fn[i] = f(mesh.nodes[i][0], mesh.nodes[i][1]);
  std::vector<double> b(mesh.nodes.size(), 0.0);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    double area = mesh.triangle_area(t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 3; ++c) {
        b[tri[a]] += area / 12.0 * (a == c ? 2.0 : 1.0) * fn[tri[c]];
      }
    }
  }
  return b;
}

inline std::vector<double> nodal_interpolate(const Mesh& mesh,
                                             const std::function<double(double, double)>& f) {
  std::vector<double> u(mesh.nodes.size());
  for (size_t i = 0; i < u.size(); ++i) u[i] = f(mesh.nodes[i][0], mesh.nodes[i][1]);
  return u;
}

inline double integrate(const Mesh& mesh, const std::vector<double>& u) {
  if (u.size() != mesh.nodes.size()) throw ArgumentError("integrate: field/mesh mismatch");
  double acc = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    acc += mesh.triangle_area(t) * (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
  }
  return acc;
}

inline double l2_norm(const Mesh& mesh, const std::vector<double>& u) {
  if (u.size() != mesh.nodes.size()) throw ArgumentError("l2_norm: field/mesh mismatch");
  double acc = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    double a = u[tri[0]], b = u[tri[1]], c = u[tri[2]];
    acc += mesh.triangle_area(t) / 6.0 * (a * a + b * b + c * c + a * b + b * c + a * c);
  }
  return std::sqrt(std::max(acc, 0.0));
}

inline double l2_error(const Mesh& mesh, const std::vector<double>& u,
                       const std::function<double(double, double)>& reference) {
  std::vector<double> diff(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    diff[i] = u[i] - reference(mesh.nodes[i][0], mesh.nodes[i][1]);
  }
  return l2_norm(mesh, diff);
}

struct GradientNorms {
  double dx_sq = 0.0;
  double dy_sq = 0.0;
};

inline GradientNorms gradient_l2_squared(const Mesh& mesh, const std::vector<double>& u) {
  if (u.size() != mesh.nodes.size()) {
    throw ArgumentError("gradient_l2_squared: field/mesh mismatch");
  }
  GradientNorms out;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto g = detail::element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    double ux = 0.0, uy = 0.0;
    for (int a = 0; a < 3; ++a) {
      ux += g.gx[a] * u[tri[a]];
      uy += g.gy[a] * u[tri[a]];
    }
    out.dx_sq += g.area * ux * ux;
    out.dy_sq += g.area * uy * uy;
  }
  return out;
}

}  // namespace thinhom
