// Acceptance harness: runs the numbered end-to-end checks, prints one
// PASS/FAIL line per check, and exits nonzero when any of them fails.
// An optional list of check numbers on the command line restricts the run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "thinhom/artifacts.hpp"
#include "thinhom/cell_problem.hpp"
#include "thinhom/limit1d.hpp"
#include "thinhom/verify.hpp"

namespace fs = std::filesystem;
using namespace thinhom;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reference values recorded from the first complete run of this binary on the
// reference setup; later runs must reproduce them to relative kSweepRefTol.
// A NaN entry means "not recorded yet": the check then prints the fresh value
// so it can be pinned, and does not count as a mismatch.
constexpr double kQhatRef = 0.6419861154178289;
constexpr double kQhatRefTol = 1e-9;
constexpr double kSweepRelErrRef[3] = {0.18768021809129443, 0.20893750488864787,
                                       0.20619499364081836};
constexpr long kSweepCellsRef[3] = {45108, 180136, 718864};
constexpr double kSweepRefTol = 1e-6;

struct Harness {
  int failed = 0;

  void verdict(int id, const char* name, bool ok, const std::string& details) {
    if (!ok) ++failed;
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, details.c_str());
    std::fflush(stdout);
  }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) { return format_double(v); }

std::string secs(const Timer& t) { return fmt(std::round(t.s() * 10.0) / 10.0) + " s"; }

const Profile& wavy_top() {
  static auto g = Profile::cosine_series(1.0, {}, {{0.5, 1}});
  return g;
}

const Profile& wavy_bottom() {
  static auto h = Profile::cosine_series(1.0, {{1.0, 1}}, {});
  return h;
}

Tabulated tabulate(const std::function<double(double)>& fn, int m) {
  std::vector<double> xs = linspace(0.0, 1.0, m + 1);
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) ys[i] = fn(xs[i]);
  return Tabulated(std::move(xs), std::move(ys));
}

// 1D limit of the configured pipeline: cell coefficients, then the
// tridiagonal solve with the fiber-averaged forcing mass_coeff * f.
Tabulated pipeline_limit(const Homogenized& hom, const std::function<double(double)>& f, int m) {
  LimitProblem prob;
  prob.q_hat = hom.q_hat;
  prob.mass_coeff = hom.mass_coeff();
  prob.m = m;
  prob.f_hat = tabulate([&](double x) { return hom.mass_coeff() * f(x); }, m);
  std::vector<double> u0 = solve_limit(prob);
  return Tabulated(linspace(0.0, 1.0, m + 1), std::move(u0));
}

void check_flat_cell(Harness& h) {
  Timer t;
  Homogenized hom = homogenize(Profile::constant(1.25), Profile::constant(0.75), 32);
  bool ok = std::abs(hom.q_hat - 2.0) <= 1e-8 && hom.p == 0.0 &&
            std::abs(hom.mass_coeff() - 2.0) <= 1e-12 && t.s() < 5.0;
  h.verdict(1, "flat cell coefficients are exact",
            ok,
            "q_hat = " + fmt(hom.q_hat) + " (expected 2 within 1e-8), p = " + fmt(hom.p) +
                " (expected exactly 0), " + secs(t));
}

void check_cell_energy(Harness& h) {
  Timer t;
  CellSpec cell(wavy_top(), 0.0);
  CellSolution sol = solve_cell_problem(cell, 32);
  QhatForms q = compute_qhat_forms(sol);
  double gap = std::abs(q.flux - q.energy) / q.flux;
  bool ok = gap < 0.01 && q.flux > 0.0 && q.flux < 1.0 && q.energy > 0.0 && q.energy < 1.0 &&
            t.s() < 30.0;
  h.verdict(2, "cell flux and energy forms agree",
            ok,
            "flux = " + fmt(q.flux) + ", energy = " + fmt(q.energy) + ", gap = " +
                fmt(gap * 100.0) + "% (< 1%), both in (0, 1), " + secs(t));
}

void check_cell_self_convergence(Harness& h) {
  Timer t;
  Homogenized hom = homogenize(wavy_top(), Profile::constant(0.0), 32);
  double diff = std::abs(hom.q_flux_coarse - hom.q_flux_fine) / hom.q_flux_fine;
  bool ok = diff < 0.02 && hom.q_hat_error_bar > 0.0 &&
            std::abs(hom.q_hat - 0.642) < 2.5e-3;
  h.verdict(3, "cell coefficient is grid-converged",
            ok,
            "levels " + std::to_string(hom.npp_coarse) + "/" + std::to_string(hom.npp_fine) +
                " differ by " + fmt(diff * 100.0) + "% (< 2%), extrapolant " + fmt(hom.q_hat) +
                " +/- " + fmt(hom.q_hat_error_bar) + ", " + secs(t));
}

void check_limit_oracle(Harness& h) {
  Timer t;
  auto exact = analytic_limit_cosine(1.0, 1.0, 1);
  double amp_err = 0.0;
  std::vector<double> hs, errs;
  for (int m : {64, 128, 256}) {
    LimitProblem prob;
    prob.q_hat = 1.0;
    prob.mass_coeff = 1.0;
    prob.m = m;
    prob.f_hat = tabulate([](double x) { return std::cos(kPi * x); }, m);
    std::vector<double> u = solve_limit(prob);
    hs.push_back(1.0 / m);
    errs.push_back(l2_error_1d(u, exact));
    if (m == 256) amp_err = std::abs(u.front() - 1.0 / (1.0 + kPi * kPi));
  }
  double rate = fit_loglog_slope(hs, errs);
  bool ok = rate >= 1.9 && amp_err <= 1e-4;
  h.verdict(4, "1D solver matches the closed-form solution",
            ok,
            "rate " + fmt(rate) + " (>= 1.9), amplitude off by " + fmt(amp_err) +
                " (<= 1e-4), " + secs(t));
}

void check_flat_end_to_end(Harness& h) {
  Timer t;
  Profile g = Profile::constant(1.0);
  Profile hb = Profile::constant(0.0);
  Homogenized hom = homogenize(g, hb, 32);
  Tabulated u0 = pipeline_limit(hom, [](double x) { return std::cos(kPi * x); }, 1024);
  auto f2 = std::function<double(double, double)>(
      [](double x, double) { return std::cos(kPi * x); });

  bool small_ok = true;
  std::string levels;
  for (double eps : {0.2, 0.1}) {
    ThinDomainSpec spec(eps, 1.5, g, hb);
    EpsilonSolution sol = solve_epsilon_problem(spec, f2, resolution_for(spec, 64));
    double rel = error_vs_limit(sol, u0).second;
    small_ok = small_ok && rel < 1e-3;
    if (!levels.empty()) levels += ", ";
    levels += "rel_err(" + fmt(eps) + ") = " + fmt(rel);
  }

  std::vector<double> hs, errs;
  for (int n : {16, 32, 64}) {
    ThinDomainSpec spec(0.2, 1.5, g, hb);
    EpsilonSolution sol = solve_epsilon_problem(spec, f2, Resolution{n, n / 2});
    hs.push_back(1.0 / n);
    errs.push_back(error_vs_limit(sol, u0).second);
  }
  double rate = fit_loglog_slope(hs, errs);
  bool ok = small_ok && rate >= 1.8;
  h.verdict(5, "flat strip reproduces its limit to 1e-3",
            ok, levels + " (< 1e-3), refinement rate " + fmt(rate) + " (>= 1.8), " + secs(t));
}

void check_main_sweep(Harness& h) {
  Timer t;
  Homogenized hom = homogenize(wavy_top(), wavy_bottom(), 32);
  Tabulated u0 = pipeline_limit(hom, [](double x) { return std::cos(kPi * x); }, 256);
  auto f2 = std::function<double(double, double)>(
      [](double x, double) { return std::cos(kPi * x); });

  ConvergenceOptions opt;
  opt.points_per_period = 16;
  // The largest mesh caps the reachable relative residual near 3e-9; 1e-8
  // stays above that floor yet six orders below the discretization error.
  opt.tol = 1e-8;
  opt.workers = 1;
  ConvergenceReport cr =
      convergence_study(wavy_top(), wavy_bottom(), 1.5, f2, {0.2, 0.1, 0.05}, u0, nullptr,
                        0.0, opt);

  bool solves_ok = cr.failures.empty() && cr.runs.size() == 3;
  std::string trail;
  bool pins_ok = std::abs(hom.q_hat - kQhatRef) <= kQhatRefTol * kQhatRef;
  std::string pin_note = pins_ok ? "" : " q_hat drifted from " + fmt(kQhatRef) + ";";
  if (solves_ok) {
    for (size_t i = 0; i < 3; ++i) {
      const EpsilonRun& r = cr.runs[i];
      if (!trail.empty()) trail += " -> ";
      trail += fmt(r.rel_err);
      if (r.cells != kSweepCellsRef[i]) {
        pins_ok = false;
        pin_note += " cells(" + fmt(r.epsilon) + ") = " + std::to_string(r.cells) +
                    " != " + std::to_string(kSweepCellsRef[i]) + ";";
      }
      if (std::isnan(kSweepRelErrRef[i])) {
        pin_note += " record rel_err(" + fmt(r.epsilon) + ") = " + fmt(r.rel_err) + ";";
      } else if (std::abs(r.rel_err - kSweepRelErrRef[i]) > kSweepRefTol * kSweepRelErrRef[i]) {
        pins_ok = false;
        pin_note += " rel_err(" + fmt(r.epsilon) + ") = " + fmt(r.rel_err) + " != " +
                    fmt(kSweepRelErrRef[i]) + ";";
      }
    }
  }
  bool time_ok = t.s() < 600.0;

  bool ok = solves_ok && cr.decreasing_ok && cr.halving_ok && pins_ok && time_ok;
  std::string details = "rel_err " + trail + ", " + std::to_string(cr.non_monotone_pairs) +
                        " non-monotone pair(s) (<= 1)";
  if (solves_ok) {
    details += ", final " + fmt(cr.runs.back().rel_err) + (cr.halving_ok ? " < " : " >= ") +
               "half of " + fmt(cr.runs.front().rel_err);
  } else {
    for (const auto& f : cr.failures) details += "; " + f;
  }
  if (!pin_note.empty()) details += ";" + pin_note;
  details += ", " + secs(t);
  h.verdict(6, "oscillating sweep error decays", ok, details);

  double factor = 0.0;
  if (solves_ok) {
    const AprioriNorms& first = cr.runs.front().norms;
    for (const EpsilonRun& r : cr.runs) {
      factor = std::max({factor, r.norms.u_l2 / first.u_l2, r.norms.du1_l2 / first.du1_l2,
                         r.norms.du2_scaled_l2 / first.du2_scaled_l2});
    }
  }
  h.verdict(7, "solution norms stay bounded across the sweep", solves_ok && factor <= 3.0,
            "largest growth factor " + fmt(factor) + " (<= 3) over |u|, |d1 u|, (1/eps)|d2 u|");
}

void check_layer_scaling(Harness& h) {
  Timer t;
  auto runs = layer_scaling_study(2.0, {0.4, 0.3, 0.2}, [](double x) { return x; },
                                  [](double) { return 1.0; }, 32);
  double lo37 = 1e300, hi37 = 0.0, lo38 = 1e300, hi38 = 0.0;
  for (const LayerRun& r : runs) {
    lo37 = std::min(lo37, r.ratio_mean);
    hi37 = std::max(hi37, r.ratio_mean);
    lo38 = std::min(lo38, r.ratio_energy);
    hi38 = std::max(hi38, r.ratio_energy);
  }
  double s37 = hi37 / lo37;
  double s38 = hi38 / lo38;

  auto flat = layer_scaling_study(2.0, {0.3}, [](double) { return 1.0; },
                                  [](double) { return 0.0; }, 32);
  double dev = flat[0].mean_deviation_sq;
  double en = flat[0].energy;

  bool ok = s37 < 3.0 && s38 < 3.0 && dev <= 1e-10 && en <= 1e-10;
  h.verdict(8, "thin-layer ratios are bounded",
            ok,
            "ratio spreads " + fmt(s37) + " and " + fmt(s38) + " (< 3); constant data leaves " +
                fmt(dev) + " / " + fmt(en) + " (<= 1e-10), " + secs(t));
}

double poisson_mms_error(int n) {
  Mesh mesh = mesh_graph_domain([](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, 1.0,
                                n, n, "mms");
  CsrMatrix A = assemble_stiffness(mesh, {1.0, 1.0});
  std::vector<double> b = assemble_mass_load(
      mesh, [](double x, double y) { return 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y); });
  std::vector<std::pair<size_t, double>> bc;
  for (int i = 0; i <= mesh.nx; ++i) {
    for (int j = 0; j <= mesh.ny; ++j) {
      if (i == 0 || i == mesh.nx || j == 0 || j == mesh.ny) {
        bc.push_back({static_cast<size_t>(mesh.node_id(i, j)), 0.0});
      }
    }
  }
  apply_dirichlet(A, b, bc);
  SolveResult sol = solve_cg(A, b, {});
  return l2_error(mesh, sol.x,
                  [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
}

double stiffness_kernel_defect(const Mesh& mesh, DiffusionTensor tensor) {
  CsrMatrix A = assemble_stiffness(mesh, tensor);
  std::vector<double> ones(mesh.nodes.size(), 1.0);
  std::vector<double> out(ones.size(), 0.0);
  A.multiply(ones, out);
  double worst = 0.0;
  for (double v : out) worst = std::max(worst, std::abs(v));
  return worst;
}

void check_fem_kernel(Harness& h) {
  Timer t;
  std::vector<double> hs, errs;
  for (int n : {16, 32, 64}) {
    hs.push_back(1.0 / n);
    errs.push_back(poisson_mms_error(n));
  }
  double rate = fit_loglog_slope(hs, errs);

  double defect = 0.0;
  defect = std::max(defect, stiffness_kernel_defect(
                                mesh_graph_domain([](double) { return 0.0; },
                                                  [](double) { return 1.0; }, 0.0, 1.0, 24, 24,
                                                  "square"),
                                {1.0, 1.0}));
  defect = std::max(defect, stiffness_kernel_defect(
                                mesh_graph_domain(
                                    [](double x) { return -1.0 - std::cos(2.0 * kPi * x); },
                                    [](double x) { return 1.0 + 0.5 * std::sin(2.0 * kPi * x); },
                                    0.0, 1.0, 48, 24, "wavy"),
                                {1.0, 25.0}));
  defect = std::max(defect,
                    stiffness_kernel_defect(mesh_cell(CellSpec(wavy_top(), 0.5), 16), {1.0, 1.0}));
  defect = std::max(defect, stiffness_kernel_defect(mesh_rectangle(RectangleSpec(0.3, 2.0), 16, 40),
                                                    {1.0, 1.0 / 0.09}));

  bool ok = rate >= 1.9 && defect <= 1e-10;
  h.verdict(9, "assembly kernel is consistent",
            ok,
            "manufactured-solution rate " + fmt(rate) + " (>= 1.9), worst |A*1| = " + fmt(defect) +
                " (<= 1e-10) over four mesh families, " + secs(t));
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("'") + THINHOM_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check_determinism(Harness& h) {
  Timer t;
  fs::path base = fs::temp_directory_path() / "thinhom_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  std::string cfg = std::string(THINHOM_CONFIG_DIR) + "/main_experiment.ini";
  fs::path a = base / "det_a";
  fs::path b = base / "det_b";

  int rc_a = run_cli("converge --config '" + cfg + "' --deterministic --out '" + a.string() + "'");
  int rc_b = run_cli("converge --config '" + cfg + "' --deterministic --out '" + b.string() + "'");

  bool ok = rc_a == 0 && rc_b == 0;
  std::string mismatch;
  for (const char* name : {"convergence.csv", "u0.csv", "theta.csv", "q_profile.csv",
                           "coefficients.json"}) {
    std::string fa, fb;
    try {
      fa = read_text_file((a / name).string());
      fb = read_text_file((b / name).string());
    } catch (const IoError&) {
    }
    if (fa != fb || fa.empty()) {
      ok = false;
      mismatch += std::string(" ") + name;
    }
  }
  h.verdict(10, "deterministic runs are byte-identical",
            ok,
            std::string("exit codes ") + std::to_string(rc_a) + "/" + std::to_string(rc_b) +
                (mismatch.empty() ? ", all five artifacts match" : ", mismatch in" + mismatch) +
                ", " + secs(t));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto selected = [&](std::initializer_list<int> ids) {
    if (wanted.empty()) return true;
    for (int id : ids) {
      if (wanted.count(id) > 0) return true;
    }
    return false;
  };

  Harness h;
  Timer total;
  try {
    if (selected({1})) check_flat_cell(h);
    if (selected({2})) check_cell_energy(h);
    if (selected({3})) check_cell_self_convergence(h);
    if (selected({4})) check_limit_oracle(h);
    if (selected({5})) check_flat_end_to_end(h);
    if (selected({6, 7})) check_main_sweep(h);
    if (selected({8})) check_layer_scaling(h);
    if (selected({9})) check_fem_kernel(h);
    if (selected({10})) check_determinism(h);
  } catch (const std::exception& e) {
    std::printf("[FAIL] -- aborted: %s\n", e.what());
    ++h.failed;
  }

  std::printf("%s: %d failure(s), %s total\n", h.failed == 0 ? "ACCEPTED" : "REJECTED", h.failed,
              secs(total).c_str());
  return h.failed == 0 ? 0 : 1;
}
