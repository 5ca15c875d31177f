#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "thinhom/domain.hpp"
#include "thinhom/errors.hpp"

namespace thinhom {

enum class EdgeTag { Bottom, Top, Left, Right };

inline const char* edge_tag_name(EdgeTag t) {
  switch (t) {
    case EdgeTag::Bottom: return "bottom";
    case EdgeTag::Top: return "top";
    case EdgeTag::Left: return "left";
    case EdgeTag::Right: return "right";
  }
  return "?";
}

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  EdgeTag tag = EdgeTag::Bottom;
};

// Structured triangulation of a graph-bounded domain. Nodes are laid out
// column-major on an (nx+1) x (ny+1) grid; each quad is split along the
// (i,j) -> (i+1,j+1) diagonal.
struct Mesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::pair<int, int>> periodic_pairs;  // (master, slave)
  std::string provenance;
  int nx = 0;
  int ny = 0;

  int node_id(int i, int j) const { return i * (ny + 1) + j; }

  double triangle_area(size_t t) const {
    const auto& tri = triangles[t];
    const auto& p0 = nodes[static_cast<size_t>(tri[0])];
    const auto& p1 = nodes[static_cast<size_t>(tri[1])];
    const auto& p2 = nodes[static_cast<size_t>(tri[2])];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
  }

  double total_area() const {
    double a = 0.0;
    for (size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
    return a;
  }

  void validate() const {
    for (size_t t = 0; t < triangles.size(); ++t) {
      if (!(triangle_area(t) > 0.0)) {
        throw GeometryError("Mesh: nonpositive triangle area at element " + std::to_string(t) +
                            " (" + provenance + ")");
      }
    }
  }
};

inline Mesh mesh_graph_domain(const std::function<double(double)>& lower,
                              const std::function<double(double)>& upper, double x0, double x1,
                              int nx, int ny, std::string provenance = "graph") {
  if (nx < 2 || ny < 2) throw ArgumentError("mesh_graph_domain: nx and ny must be >= 2");
  if (!(x1 > x0)) throw ArgumentError("mesh_graph_domain: empty x range");

  Mesh m;
  m.provenance = std::move(provenance);
  m.nx = nx;
  m.ny = ny;
  m.nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int i = 0; i <= nx; ++i) {
    double x = x0 + (x1 - x0) * static_cast<double>(i) / nx;
    if (i == nx) x = x1;
    double lo = lower(x);
    double hi = upper(x);
    if (!(hi > lo)) {
      throw GeometryError("mesh_graph_domain: degenerate fiber at x = " + std::to_string(x));
    }
    for (int j = 0; j <= ny; ++j) {
      double t = static_cast<double>(j) / ny;
      m.nodes[static_cast<size_t>(m.node_id(i, j))] = {x, lo + t * (hi - lo)};
    }
  }

  m.triangles.reserve(static_cast<size_t>(nx) * ny * 2);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      int v00 = m.node_id(i, j);
      int v10 = m.node_id(i + 1, j);
      int v01 = m.node_id(i, j + 1);
      int v11 = m.node_id(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }

  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({m.node_id(i, 0), m.node_id(i + 1, 0), EdgeTag::Bottom});
    m.boundary_edges.push_back({m.node_id(i, ny), m.node_id(i + 1, ny), EdgeTag::Top});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back({m.node_id(0, j), m.node_id(0, j + 1), EdgeTag::Left});
    m.boundary_edges.push_back({m.node_id(nx, j), m.node_id(nx, j + 1), EdgeTag::Right});
  }

  m.validate();
  return m;
}

// Mesh of one periodicity cell; lateral node columns are geometrically
// congruent and paired master (left) to slave (right).
inline Mesh mesh_cell(const CellSpec& cell, int nodes_per_period, int ny = 0) {
  if (nodes_per_period < 8) throw ArgumentError("mesh_cell: need at least 8 nodes per period");
  double L1 = cell.L1();
  if (ny <= 0) {
    ny = std::max(4, static_cast<int>(std::ceil(nodes_per_period * cell.height() / L1)));
  }
  const Profile& g = cell.g;
  Mesh m = mesh_graph_domain([&](double) { return -cell.h0; },
                             [&](double y1) { return g.value(y1); }, 0.0, L1, nodes_per_period,
                             ny, "cell(npp=" + std::to_string(nodes_per_period) + ")");
  // The profile is periodic, but enforce exact lateral congruence so the
  // master/slave merge never sees roundoff.
  for (int j = 0; j <= m.ny; ++j) {
    int left = m.node_id(0, j);
    int right = m.node_id(m.nx, j);
    m.nodes[static_cast<size_t>(right)][1] = m.nodes[static_cast<size_t>(left)][1];
    m.periodic_pairs.push_back({left, right});
  }
  m.validate();
  return m;
}

inline Mesh mesh_rectangle(const RectangleSpec& rect, int nx, int ny) {
  double w = rect.half_width();
  return mesh_graph_domain([](double) { return 0.0; }, [](double) { return 1.0; }, -w, w, nx, ny,
                           "rectangle(eps=" + std::to_string(rect.epsilon) + ")");
}

struct Resolution {
  int nx = 0;
  int ny = 0;

  long cells() const { return 2L * nx * ny; }
};

// Grid sizes that resolve the fastest boundary oscillation. The horizontal
// step follows the shortest oscillation period present; the vertical count
// keeps the pre-rescaling (physical) vertical spacing no larger than the
// horizontal one, so element quality is judged where the operator is
// isotropic.
inline Resolution resolution_for(const ThinDomainSpec& spec, int points_per_period,
                                 long cell_cap = 2'000'000) {
  if (points_per_period < 4) {
    throw ArgumentError("resolution_for: points_per_period must be >= 4");
  }
  double period_x = 0.0;
  if (!spec.h.is_constant()) {
    period_x = std::pow(spec.epsilon, spec.alpha) * spec.h.period();
  }
  if (!spec.g.is_constant()) {
    double top = spec.epsilon * spec.g.period();
    period_x = (period_x > 0.0) ? std::min(period_x, top) : top;
  }
  int nx;
  if (period_x > 0.0) {
    nx = static_cast<int>(std::ceil(points_per_period / period_x));
  } else {
    nx = points_per_period;  // flat profiles: one "period" = whole interval
  }
  double height = spec.g.max() + spec.h.max();
  int ny = std::max(8, static_cast<int>(std::ceil(nx * spec.epsilon * height)));
  Resolution r{nx, ny};
  if (r.cells() > cell_cap) {
    throw CapacityError("resolution_for: required mesh " + std::to_string(nx) + " x " +
                            std::to_string(ny) + " = " + std::to_string(r.cells()) +
                            " cells exceeds the cap of " + std::to_string(cell_cap),
                        r.cells(), cell_cap);
  }
  return r;
}

}  // namespace thinhom
