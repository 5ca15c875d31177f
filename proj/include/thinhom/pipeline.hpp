#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thinhom/artifacts.hpp"
#include "thinhom/cell_problem.hpp"
#include "thinhom/config.hpp"
#include "thinhom/limit1d.hpp"
#include "thinhom/verify.hpp"

namespace thinhom {

struct PipelineOptions {
  std::string out_dir;         // empty: take the configured directory
  int workers = -1;            // negative: take the configured count
  bool deterministic = false;  // or-combined with the configured flag
  bool verbose = false;
  bool dump_mesh = false;
};

struct PipelineSelection {
  bool cell = false;
  bool limit = false;
  bool sweep = false;
  bool lemma = false;
  std::optional<double> single_eps;  // one-off solve instead of the sweep
};

namespace detail {

inline std::string join_rel_errors(const std::vector<EpsilonRun>& runs) {
  std::string s;
  for (size_t i = 0; i < runs.size(); ++i) {
    if (i > 0) s += " -> ";
    s += format_double(runs[i].rel_err);
  }
  return s;
}

// max/min over positive entries; 0 when everything is numerically zero.
inline double ratio_spread(const std::vector<double>& v) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double x : v) {
    if (first) {
      lo = hi = x;
      first = false;
    } else {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (hi <= 1e-12) return 0.0;
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace detail

// Runs the selected stages, writes artifacts into the output directory, and
// returns 0 on success or 1 when any epsilon solve failed (a partial report
// is still written in that case).
inline int run_pipeline(const RunConfig& cfg, const PipelineSelection& sel, PipelineOptions opt,
                        std::ostream& log) {
  std::string out_dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
  int workers = opt.workers >= 0 ? opt.workers : cfg.workers;
  bool deterministic = opt.deterministic || cfg.deterministic;
  if (deterministic) workers = 1;

  RunConfig resolved = cfg;
  resolved.out_dir = out_dir;
  resolved.workers = workers;
  resolved.deterministic = deterministic;

  ensure_dir(out_dir);
  auto path = [&](const char* name) { return out_dir + "/" + name; };

  nlohmann::json report = {
      {"schema_version", kSchemaVersion},
      {"version", version_string()},
      {"config", write_config(resolved)},
      {"notes",
       {{"error_measure",
         "L2 distances are measured on the oscillating two-dimensional domain itself; "
         "the one-dimensional limit is extended fiberwise and compared there."}}},
  };
  nlohmann::json verdicts = nlohmann::json::array();
  auto add_verdict = [&](const std::string& name, bool passed, const std::string& details) {
    verdicts.push_back({{"name", name}, {"passed", passed}, {"details", details}});
    if (opt.verbose) log << (passed ? "PASS " : "FAIL ") << name << ": " << details << "\n";
  };

  std::function<double(double, double)> f2 = [&](double x, double) {
    return forcing_value(cfg.forcing, x);
  };
  std::function<double(double)> f1 = [&](double x) { return forcing_value(cfg.forcing, x); };

  std::optional<Homogenized> hom;
  if (sel.cell) {
    if (opt.verbose) {
      log << "cell: two-level solve at " << cfg.cell_nodes_per_period / 2 << " and "
          << cfg.cell_nodes_per_period << " nodes per period\n";
    }
    hom = homogenize(cfg.g, cfg.h, cfg.cell_nodes_per_period, cfg.tol);
    CellSpec cell(cfg.g, cfg.h.min());
    CellSolution fine = solve_cell_problem(cell, cfg.cell_nodes_per_period, 0, cfg.tol);
    write_text_file(path("theta.csv"), tabulated_csv(hom->theta, "x2", "theta"));
    write_text_file(path("q_profile.csv"), tabulated_csv(q_profile(fine), "x2", "q"));
    write_json_file(path("coefficients.json"), coefficients_json(*hom));
    if (opt.dump_mesh) {
      write_text_file(path("cell_nodes.csv"), mesh_nodes_csv(fine.mesh));
      write_text_file(path("cell_triangles.csv"), mesh_triangles_csv(fine.mesh));
      write_text_file(path("cell_boundary.csv"), mesh_boundary_csv(fine.mesh));
    }
    report["coefficients"] = coefficients_json(*hom);
    bool in_bounds = hom->q_hat > 0.0 && hom->q_hat <= hom->area_ratio + 1e-12;
    add_verdict("qhat_in_bounds", in_bounds,
                "q_hat = " + format_double(hom->q_hat) + ", admissible range (0, " +
                    format_double(hom->area_ratio) + "]");
  }

  std::optional<Tabulated> u0_tab;
  std::vector<double> u0;
  if (sel.limit) {
    if (opt.verbose) log << "limit: 1D solve on " << cfg.grid_m << " elements\n";
    LimitProblem prob;
    prob.q_hat = hom->q_hat;
    prob.mass_coeff = hom->mass_coeff();
    prob.m = cfg.grid_m;
    std::vector<double> xs = linspace(0.0, 1.0, cfg.grid_m + 1);
    std::vector<double> ys(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ys[i] = prob.mass_coeff * f1(xs[i]);
    prob.f_hat = Tabulated(xs, std::move(ys));
    u0 = solve_limit(prob);
    u0_tab = Tabulated(xs, u0);
    write_text_file(path("u0.csv"), u0_csv(u0));
    report["limit"] = {{"m", cfg.grid_m},
                       {"q_hat", prob.q_hat},
                       {"mass_coeff", prob.mass_coeff},
                       {"u0_max_abs",
                        std::abs(*std::max_element(u0.begin(), u0.end(),
                                                   [](double a, double b) {
                                                     return std::abs(a) < std::abs(b);
                                                   }))}};
  }

  std::vector<std::string> failures;
  if (sel.single_eps) {
    double eps = *sel.single_eps;
    if (opt.verbose) log << "solve: epsilon = " << eps << "\n";
    ThinDomainSpec spec(eps, cfg.alpha, cfg.g, cfg.h);
    Resolution res = resolution_for(spec, cfg.points_per_period, cfg.cell_cap);
    EpsilonSolution sol = solve_epsilon_problem(spec, f2, res, cfg.tol, &*u0_tab);
    error_vs_limit(sol, *u0_tab);
    Tabulated fhat = compute_fhat(spec, f2, 256);
    sol.run.fhat_gap = primitive_gap(fhat, hom->mass_coeff(), f1);
    write_text_file(path("convergence.csv"), convergence_csv({sol.run}));
    if (opt.dump_mesh) {
      write_text_file(path("eps_nodes.csv"), mesh_nodes_csv(sol.mesh));
      write_text_file(path("eps_triangles.csv"), mesh_triangles_csv(sol.mesh));
      write_text_file(path("eps_boundary.csv"), mesh_boundary_csv(sol.mesh));
    }
    report["convergence"] = {{"runs", nlohmann::json::array({epsilon_run_json(sol.run)})}};
  } else if (sel.sweep) {
    if (opt.verbose) {
      log << "sweep: " << cfg.eps_list.size() << " epsilon values, "
          << (workers == 0 ? std::string("auto") : std::to_string(workers)) << " workers\n";
    }
    ConvergenceOptions copt;
    copt.points_per_period = cfg.points_per_period;
    copt.cell_cap = cfg.cell_cap;
    copt.tol = cfg.tol;
    copt.workers = workers;
    ConvergenceReport cr = convergence_study(cfg.g, cfg.h, cfg.alpha, f2, cfg.eps_list, *u0_tab,
                                             &f1, hom->mass_coeff(), copt);
    failures = cr.failures;
    write_text_file(path("convergence.csv"), convergence_csv(cr.runs));

    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : cr.runs) runs.push_back(epsilon_run_json(r));
    nlohmann::json conv = {{"runs", runs},
                           {"exact_case", cr.exact_case},
                           {"non_monotone_pairs", cr.non_monotone_pairs},
                           {"apriori_factor", cr.apriori_factor}};
    if (cr.slope) conv["slope"] = *cr.slope;
    if (!cr.failures.empty()) conv["failures"] = cr.failures;
    report["convergence"] = conv;

    if (failures.empty()) {
      if (cr.exact_case) {
        bool exact_ok = true;
        for (const auto& r : cr.runs) exact_ok = exact_ok && r.rel_err >= 0.0;
        if (cfg.forcing.kind == Forcing::Kind::Constant) {
          for (const auto& r : cr.runs) exact_ok = exact_ok && r.rel_err < 1e-8;
          add_verdict("flat_exact", exact_ok,
                      "relative errors on the flat domain: " + detail::join_rel_errors(cr.runs));
        }
      } else {
        add_verdict("errors_decreasing", cr.decreasing_ok,
                    "rel_err " + detail::join_rel_errors(cr.runs) + " (" +
                        std::to_string(cr.non_monotone_pairs) + " non-monotone pair(s))");
        add_verdict("error_halved", cr.halving_ok,
                    "rel_err(" + format_double(cr.runs.back().epsilon) +
                        ") = " + format_double(cr.runs.back().rel_err) + " vs 0.5 * " +
                        format_double(cr.runs.front().rel_err));
      }
      add_verdict("apriori_bounded_3x", cr.apriori_ok,
                  "largest norm growth factor " + format_double(cr.apriori_factor));
    } else {
      for (const auto& f : failures) log << "error: " << f << "\n";
      add_verdict("all_solves_completed", false,
                  std::to_string(failures.size()) + " epsilon solve(s) failed");
    }
  }

  if (sel.lemma) {
    if (opt.verbose) log << "layer: " << cfg.lemma31_eps.size() << " epsilon values\n";
    auto u0f = [&](double x) { return layer_data_value(cfg.lemma31_u0, x); };
    auto u0d = [&](double x) { return layer_data_derivative(cfg.lemma31_u0, x); };
    std::vector<LayerRun> lruns = layer_scaling_study(cfg.lemma31_alpha, cfg.lemma31_eps, u0f,
                                                      u0d, cfg.layer_points, cfg.tol);
    write_text_file(path("lemma31.csv"), lemma31_csv(lruns));
    nlohmann::json runs = nlohmann::json::array();
    std::vector<double> r37, r38;
    for (const auto& r : lruns) {
      runs.push_back(layer_run_json(r));
      r37.push_back(r.ratio_mean);
      r38.push_back(r.ratio_energy);
    }
    double s37 = detail::ratio_spread(r37);
    double s38 = detail::ratio_spread(r38);
    report["lemma31"] = {{"runs", runs}, {"ratio37_spread", s37}, {"ratio38_spread", s38}};
    if (lruns.size() >= 2) {
      add_verdict("layer_ratios_bounded", s37 < 3.0 && s38 < 3.0,
                  "ratio spreads " + format_double(s37) + " and " + format_double(s38) +
                      " (bound 3)");
    }
  }

  report["verdicts"] = verdicts;
  write_json_file(path("report.json"), report);
  if (opt.verbose || !failures.empty()) {
    log << "wrote " << out_dir << "/report.json\n";
  }
  return failures.empty() ? 0 : 1;
}

}  // namespace thinhom
