#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "thinhom/domain.hpp"
#include "thinhom/errors.hpp"
#include "thinhom/fem.hpp"
#include "thinhom/limit1d.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/numerics.hpp"
#include "thinhom/sparse.hpp"

namespace thinhom {

struct AprioriNorms {
  double u_l2 = 0.0;
  double du1_l2 = 0.0;
  double du2_scaled_l2 = 0.0;  // (1/eps) * vertical-derivative norm
};

struct EpsilonRun {
  double epsilon = 0.0;
  int nx = 0;
  int ny = 0;
  long cells = 0;
  AprioriNorms norms;
  double abs_err = -1.0;
  double rel_err = -1.0;
  double fhat_gap = -1.0;  // weak-limit diagnostic; negative when not computed
  int iterations = 0;
  double final_residual = 0.0;
};

struct EpsilonSolution {
  EpsilonRun run;
  Mesh mesh;
  std::vector<double> u;
};

// Full oscillating-domain solve: grad-grad form with vertical weight 1/eps^2
// plus the zeroth-order term, natural boundary conditions everywhere.
inline EpsilonSolution solve_epsilon_problem(const ThinDomainSpec& spec,
                                             const std::function<double(double, double)>& f,
                                             Resolution res, double tol = 1e-10,
                                             const Tabulated* initial_guess = nullptr) {
  Mesh mesh = mesh_graph_domain([&](double x) { return lower_boundary(spec, x); },
                                [&](double x) { return upper_boundary(spec, x); }, 0.0, 1.0,
                                res.nx, res.ny,
                                "epsilon(eps=" + std::to_string(spec.epsilon) + ")");
  double inv_eps2 = 1.0 / (spec.epsilon * spec.epsilon);
  CsrMatrix A = assemble_stiffness_mass(mesh, {1.0, inv_eps2}, 1.0);
  std::vector<double> b = assemble_mass_load(mesh, f);

  SolveOptions opt;
  opt.tol = tol;
  std::vector<double> x0;
  if (initial_guess && !initial_guess->empty()) {
    x0.resize(mesh.nodes.size());
    for (size_t i = 0; i < x0.size(); ++i) x0[i] = (*initial_guess)(mesh.nodes[i][0]);
    opt.x0 = &x0;
  }
  SolveResult sol = solve_cg(A, b, opt);

  EpsilonSolution out;
  out.run.epsilon = spec.epsilon;
  out.run.nx = res.nx;
  out.run.ny = res.ny;
  out.run.cells = static_cast<long>(mesh.triangles.size());
  out.run.norms.u_l2 = l2_norm(mesh, sol.x);
  GradientNorms gn = gradient_l2_squared(mesh, sol.x);
  out.run.norms.du1_l2 = std::sqrt(gn.dx_sq);
  out.run.norms.du2_scaled_l2 = std::sqrt(gn.dy_sq) / spec.epsilon;
  out.run.iterations = sol.report.iterations;
  out.run.final_residual = sol.report.final_residual;
  out.mesh = std::move(mesh);
  out.u = std::move(sol.x);
  return out;
}

// L2 distance between the 2D solution and the 1D limit, both measured over
// the oscillating domain itself.
inline std::pair<double, double> error_vs_limit(EpsilonSolution& sol, const Tabulated& u0) {
  double abs = l2_error(sol.mesh, sol.u, [&](double x, double) { return u0(x); });
  std::vector<double> u0n(sol.mesh.nodes.size());
  for (size_t i = 0; i < u0n.size(); ++i) u0n[i] = u0(sol.mesh.nodes[i][0]);
  double den = l2_norm(sol.mesh, u0n);
  double rel = den > 0.0 ? abs / den : abs;
  sol.run.abs_err = abs;
  sol.run.rel_err = rel;
  return {abs, rel};
}

struct ConvergenceOptions {
  int points_per_period = 16;
  long cell_cap = 2'000'000;
  double tol = 1e-10;
  int workers = 0;  // 0: hardware concurrency
  int fhat_samples = 256;
};

struct ConvergenceReport {
  std::vector<EpsilonRun> runs;
  std::vector<std::string> failures;
  bool exact_case = false;
  std::optional<double> slope;
  int non_monotone_pairs = 0;
  bool decreasing_ok = false;
  bool halving_ok = false;
  double apriori_factor = 0.0;
  bool apriori_ok = false;
};

// Epsilon sweep against one fixed 1D limit. Individual solve failures are
// collected, not thrown, so a partial report survives; argument misuse still
// throws.
inline ConvergenceReport convergence_study(const Profile& g, const Profile& h, double alpha,
                                           const std::function<double(double, double)>& f,
                                           const std::vector<double>& eps_list,
                                           const Tabulated& u0,
                                           const std::function<double(double)>* f_x1 = nullptr,
                                           double fhat_limit_coeff = 0.0,
                                           ConvergenceOptions opt = {}) {
  if (eps_list.size() < 3) {
    throw ArgumentError("convergence_study: need at least 3 epsilon values");
  }
  for (size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw ArgumentError("convergence_study: epsilon list must be strictly decreasing");
    }
  }
  if (u0.empty()) throw ArgumentError("convergence_study: missing limit solution");

  size_t n = eps_list.size();
  std::vector<EpsilonRun> runs(n);
  std::vector<std::string> failures(n);
  std::atomic<size_t> next{0};

  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        ThinDomainSpec spec(eps_list[i], alpha, g, h);
        Resolution res = resolution_for(spec, opt.points_per_period, opt.cell_cap);
        EpsilonSolution sol = solve_epsilon_problem(spec, f, res, opt.tol, &u0);
        error_vs_limit(sol, u0);
        if (f_x1) {
          Tabulated fhat = compute_fhat(spec, [&](double x, double) { return (*f_x1)(x); },
                                        opt.fhat_samples);
          sol.run.fhat_gap = primitive_gap(fhat, fhat_limit_coeff, *f_x1);
        }
        runs[i] = sol.run;
      } catch (const std::exception& e) {
        failures[i] = "epsilon = " + std::to_string(eps_list[i]) + ": " + e.what();
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  size_t n_workers = opt.workers > 0 ? static_cast<size_t>(opt.workers) : (hw > 0 ? hw : 1);
  n_workers = std::min(n_workers, n);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  ConvergenceReport report;
  report.exact_case = g.is_constant() && h.is_constant();
  for (size_t i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      report.failures.push_back(failures[i]);
    } else {
      report.runs.push_back(runs[i]);
    }
  }
  if (!report.failures.empty() || report.runs.size() < 2) return report;

  const auto& rr = report.runs;
  for (size_t i = 1; i < rr.size(); ++i) {
    if (!(rr[i].rel_err < rr[i - 1].rel_err)) ++report.non_monotone_pairs;
  }
  if (report.exact_case) {
    report.decreasing_ok = true;
    report.halving_ok = true;
  } else {
    report.decreasing_ok = report.non_monotone_pairs <= 1;
    report.halving_ok = rr.back().rel_err < 0.5 * rr.front().rel_err;
    bool fittable = true;
    std::vector<double> es, errs;
    for (const auto& r : rr) {
      if (!(r.rel_err > 0.0) || !std::isfinite(r.rel_err)) fittable = false;
      es.push_back(r.epsilon);
      errs.push_back(r.rel_err);
    }
    if (fittable) report.slope = fit_loglog_slope(es, errs);
  }

  double factor = 0.0;
  const AprioriNorms& first = rr.front().norms;
  for (const auto& r : rr) {
    auto ratio = [](double v, double ref) { return ref > 0.0 ? v / ref : 0.0; };
    factor = std::max({factor, ratio(r.norms.u_l2, first.u_l2),
                       ratio(r.norms.du1_l2, first.du1_l2),
                       ratio(r.norms.du2_scaled_l2, first.du2_scaled_l2)});
  }
  report.apriori_factor = factor;
  report.apriori_ok = factor <= 3.0;
  return report;
}

struct LayerRun {
  double epsilon = 0.0;
  int nx = 0;
  int ny = 0;
  double u0_bar = 0.0;
  double u0_norm_sq = 0.0;
  double u0_deriv_norm_sq = 0.0;
  double mean_deviation_sq = 0.0;  // integral of |u - u0_bar|^2 over the rectangle
  double energy = 0.0;             // horizontal + (1/eps^2) vertical gradient energy
  double ratio_mean = 0.0;         // mean_deviation_sq / (eps^(alpha-1) * u0_norm_sq)
  double ratio_energy = 0.0;       // energy / (eps^(alpha-1) * u0_deriv_norm_sq)
  int iterations = 0;
};

// Thin-rectangle averaging study: Dirichlet data on the bottom edge, natural
// conditions elsewhere, anisotropic operator without zeroth-order term. The
// two reported ratios stay bounded when the averaging estimates hold.
inline std::vector<LayerRun> layer_scaling_study(double alpha,
                                                 const std::vector<double>& eps_list,
                                                 const std::function<double(double)>& u0,
                                                 const std::function<double(double)>& u0_deriv,
                                                 int points_per_breadth = 32,
                                                 double tol = 1e-10) {
  if (eps_list.empty()) throw ArgumentError("layer_scaling_study: empty epsilon list");
  std::vector<LayerRun> out;
  for (double eps : eps_list) {
    RectangleSpec rect(eps, alpha);
    double w = rect.half_width();
    int nx = points_per_breadth;
    int ny = std::max(8, static_cast<int>(std::ceil(points_per_breadth *
                                                    std::pow(eps, 1.0 - alpha))));
    Mesh mesh = mesh_rectangle(rect, nx, ny);

    double inv_eps2 = 1.0 / (eps * eps);
    CsrMatrix A = assemble_stiffness(mesh, {1.0, inv_eps2});
    std::vector<double> b(mesh.nodes.size(), 0.0);

    std::vector<std::pair<size_t, double>> bc;
    for (int i = 0; i <= mesh.nx; ++i) {
      size_t node = static_cast<size_t>(mesh.node_id(i, 0));
      bc.push_back({node, u0(mesh.nodes[node][0])});
    }
    apply_dirichlet(A, b, bc);

    double u0_bar = integrate_panels(u0, -w, w, nx) / (2.0 * w);
    std::vector<double> x0(mesh.nodes.size(), u0_bar);
    for (const auto& [node, val] : bc) x0[node] = val;

    SolveOptions opt;
    opt.tol = tol;
    opt.x0 = &x0;
    SolveResult sol = solve_cg(A, b, opt);

    LayerRun run;
    run.epsilon = eps;
    run.nx = nx;
    run.ny = ny;
    run.u0_bar = u0_bar;
    run.u0_norm_sq = integrate_panels([&](double x) { return u0(x) * u0(x); }, -w, w, nx);
    run.u0_deriv_norm_sq =
        integrate_panels([&](double x) { return u0_deriv(x) * u0_deriv(x); }, -w, w, nx);
    double dev = l2_error(mesh, sol.x, [&](double, double) { return u0_bar; });
    run.mean_deviation_sq = dev * dev;
    GradientNorms gn = gradient_l2_squared(mesh, sol.x);
    run.energy = gn.dx_sq + inv_eps2 * gn.dy_sq;
    double scale = std::pow(eps, alpha - 1.0);
    run.ratio_mean =
        run.u0_norm_sq > 0.0 ? run.mean_deviation_sq / (scale * run.u0_norm_sq) : 0.0;
    run.ratio_energy =
        run.u0_deriv_norm_sq > 0.0 ? run.energy / (scale * run.u0_deriv_norm_sq) : 0.0;
    run.iterations = sol.report.iterations;
    out.push_back(run);
  }
  return out;
}

}  // namespace thinhom
