#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "thinhom/domain.hpp"
#include "thinhom/errors.hpp"
#include "thinhom/fem.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/numerics.hpp"
#include "thinhom/sparse.hpp"

namespace thinhom {

struct CellSolution {
  CellSpec spec;
  Mesh mesh;
  std::vector<double> X;  // zero-mean representative
  SolveReport report;
};

// Periodic Laplace-Neumann solve on the cell: homogeneous flux on the floor,
// slope-driven flux on the oscillating top, lateral periodicity. The solution
// is grounded by pinning one unknown, then shifted to zero mean.
inline CellSolution solve_cell_problem(const CellSpec& cell, int nodes_per_period, int ny = 0,
                                       double tol = 1e-10) {
  Mesh mesh = mesh_cell(cell, nodes_per_period, ny);
  CsrMatrix A = assemble_stiffness(mesh, {1.0, 1.0});
  const Profile& g = cell.g;
  std::vector<double> b =
      assemble_boundary_load(mesh, EdgeTag::Top, [&](double x) { return -g.derivative(x); });

  PeriodicReduction red = apply_periodic(A, b, mesh.periodic_pairs);
  SolveOptions opt;
  opt.tol = tol;
  opt.pin = 0;
  SolveResult sol = solve_cg(red.matrix, red.rhs, opt);
  std::vector<double> X = expand_periodic(red, sol.x);

  double area = mesh.total_area();
  double mean = integrate(mesh, X) / area;
  for (double& v : X) v -= mean;

  return {cell, std::move(mesh), std::move(X), std::move(sol.report)};
}

struct QhatForms {
  double flux = 0.0;    // (1/L1) * integral of (1 - dX/dy1)
  double energy = 0.0;  // (1/L1) * integral of |grad(y1 - X)|^2
};

inline QhatForms compute_qhat_forms(const CellSolution& sol) {
  const Mesh& mesh = sol.mesh;
  double flux = 0.0, energy = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto geo = detail::element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    double Xx = 0.0, Xy = 0.0;
    for (int a = 0; a < 3; ++a) {
      Xx += geo.gx[a] * sol.X[tri[a]];
      Xy += geo.gy[a] * sol.X[tri[a]];
    }
    flux += geo.area * (1.0 - Xx);
    energy += geo.area * ((1.0 - Xx) * (1.0 - Xx) + Xy * Xy);
  }
  double L1 = sol.spec.L1();
  return {flux / L1, energy / L1};
}

inline double compute_qhat(const CellSolution& sol) { return compute_qhat_forms(sol).flux; }

// Work done by the top boundary data against X; equals the gradient energy of
// X in the weak form.
inline double cell_boundary_work(const CellSolution& sol) {
  const Profile& g = sol.spec.g;
  std::vector<double> b =
      assemble_boundary_load(sol.mesh, EdgeTag::Top, [&](double x) { return -g.derivative(x); });
  double w = 0.0;
  for (size_t i = 0; i < b.size(); ++i) w += b[i] * sol.X[i];
  return w;
}

inline double compute_p(const Profile& h) { return h.mean() - h.min(); }

inline double compute_area_ratio(const CellSpec& cell) { return cell.g.mean() + cell.h0; }

// Horizontal fraction of the cell lying inside the domain at height x2,
// computed from the level set {g = x2} by bracketing and bisection.
inline double compute_theta(const CellSpec& cell, double x2) {
  const Profile& g = cell.g;
  double g1 = g.max();
  if (!(x2 > -cell.h0) || !(x2 < g1)) {
    throw ArgumentError("compute_theta: height outside the open cell range");
  }
  if (x2 < g.min()) return 1.0;

  double L1 = cell.L1();
  int kmax = 1;
  for (const auto& t : g.cos_terms()) kmax = std::max(kmax, t.k);
  for (const auto& t : g.sin_terms()) kmax = std::max(kmax, t.k);
  int n = std::max(2048, 512 * kmax);

  std::vector<double> roots;
  double prev_x = 0.0;
  double prev_v = g.value(0.0) - x2;
  for (int i = 1; i <= n; ++i) {
    double x = L1 * static_cast<double>(i) / n;
    double v = g.value(x) - x2;
    if ((prev_v < 0.0 && v >= 0.0) || (prev_v >= 0.0 && v < 0.0)) {
      double a = prev_x, bnd = x, va = prev_v;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + bnd);
        double vm = g.value(m) - x2;
        if ((va < 0.0) == (vm < 0.0)) {
          a = m;
          va = vm;
        } else {
          bnd = m;
        }
      }
      roots.push_back(0.5 * (a + bnd));
    }
    prev_x = x;
    prev_v = v;
  }

  double measure = 0.0;
  double seg_start = 0.0;
  for (size_t r = 0; r <= roots.size(); ++r) {
    double seg_end = (r < roots.size()) ? roots[r] : L1;
    if (seg_end > seg_start) {
      double mid = 0.5 * (seg_start + seg_end);
      if (g.value(mid) > x2) measure += seg_end - seg_start;
      seg_start = seg_end;
    }
  }
  return measure / L1;
}

// Midpoint tabulation of theta over the open height range of the cell.
inline Tabulated theta_table(const CellSpec& cell, int n = 512) {
  if (n < 2) throw ArgumentError("theta_table: need at least 2 samples");
  double lo = -cell.h0;
  double hi = cell.g.max();
  double dx = (hi - lo) / n;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (i + 0.5) * dx;
    ys[i] = compute_theta(cell, xs[i]);
  }
  return Tabulated(std::move(xs), std::move(ys));
}

// Per-height contribution to the effective coefficient, binned by element
// centroid. Its integral over the height range reproduces the flux form of
// q_hat exactly, which is the only consistency the diagnostic must honor.
inline Tabulated q_profile(const CellSolution& sol, int bins = 64) {
  if (bins < 2) throw ArgumentError("q_profile: need at least 2 bins");
  const Mesh& mesh = sol.mesh;
  double lo = -sol.spec.h0;
  double hi = sol.spec.g.max();
  double dx = (hi - lo) / bins;
  double L1 = sol.spec.L1();
  std::vector<double> acc(bins, 0.0);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto geo = detail::element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    double Xx = 0.0;
    double yc = 0.0;
    for (int a = 0; a < 3; ++a) {
      Xx += geo.gx[a] * sol.X[tri[a]];
      yc += mesh.nodes[tri[a]][1] / 3.0;
    }
    int bin = static_cast<int>((yc - lo) / dx);
    bin = std::clamp(bin, 0, bins - 1);
    acc[bin] += geo.area * (1.0 - Xx);
  }
  std::vector<double> xs(bins), ys(bins);
  for (int i = 0; i < bins; ++i) {
    xs[i] = lo + (i + 0.5) * dx;
    ys[i] = acc[i] / (L1 * dx);
  }
  return Tabulated(std::move(xs), std::move(ys));
}

struct Homogenized {
  double q_hat = 0.0;  // Richardson extrapolant of the flux form
  double q_hat_error_bar = 0.0;
  double p = 0.0;
  double area_ratio = 0.0;
  double q_flux_coarse = 0.0;
  double q_flux_fine = 0.0;
  double q_energy_fine = 0.0;
  int npp_coarse = 0;
  int npp_fine = 0;
  int iterations = 0;
  Tabulated theta;

  double mass_coeff() const { return area_ratio + p; }
};

// Cell analysis at two resolutions; the reported coefficient is the
// second-order Richardson extrapolant with the extrapolation step as its
// error bar.
inline Homogenized homogenize(const Profile& g, const Profile& h, int nodes_per_period = 32,
                              double tol = 1e-10, int theta_samples = 512) {
  if (nodes_per_period < 16) {
    throw ArgumentError("homogenize: need at least 16 nodes per period for the two-level study");
  }
  CellSpec cell(g, h.min());
  CellSolution coarse = solve_cell_problem(cell, nodes_per_period / 2, 0, tol);
  CellSolution fine = solve_cell_problem(cell, nodes_per_period, 0, tol);
  QhatForms qc = compute_qhat_forms(coarse);
  QhatForms qf = compute_qhat_forms(fine);
  RichardsonResult rich = richardson(qc.flux, qf.flux, 2.0);

  Homogenized out;
  out.q_hat = rich.value;
  out.q_hat_error_bar = rich.error_bar;
  out.p = compute_p(h);
  out.area_ratio = compute_area_ratio(cell);
  out.q_flux_coarse = qc.flux;
  out.q_flux_fine = qf.flux;
  out.q_energy_fine = qf.energy;
  out.npp_coarse = nodes_per_period / 2;
  out.npp_fine = nodes_per_period;
  out.iterations = fine.report.iterations;
  out.theta = theta_table(cell, theta_samples);
  return out;
}

}  // namespace thinhom
