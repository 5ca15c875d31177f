#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thinhom/artifacts.hpp"
#include "thinhom/config.hpp"
#include "thinhom/pipeline.hpp"
#include "thinhom/version.hpp"

using namespace thinhom;

int main(int argc, char** argv) {
  CLI::App app{"effective 1D limit of a thin domain with oscillating boundaries"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::string config_path;
  PipelineOptions opt;
  double eps_override = -1.0;
  std::string report_dir = "out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (INI)")->required();
    sub->add_option("--out", opt.out_dir, "output directory (overrides the configured one)");
    sub->add_option("--workers", opt.workers, "worker threads for the epsilon sweep (0 = auto)");
    sub->add_flag("--deterministic", opt.deterministic,
                  "single worker and byte-stable artifacts");
    sub->add_flag("--verbose", opt.verbose, "print stage progress");
    sub->add_flag("--dump-mesh", opt.dump_mesh, "also export mesh tables");
  };

  CLI::App* c_run = app.add_subcommand("run", "cell + limit + epsilon sweep + layer study");
  add_common(c_run);
  CLI::App* c_cell = app.add_subcommand("cell", "cell problem and effective coefficients");
  add_common(c_cell);
  CLI::App* c_limit = app.add_subcommand("limit", "effective coefficients and the 1D limit");
  add_common(c_limit);
  CLI::App* c_solve = app.add_subcommand("solve-eps", "one 2D solve at a single epsilon");
  add_common(c_solve);
  c_solve->add_option("--eps", eps_override, "epsilon for this solve (default: first configured)");
  CLI::App* c_conv = app.add_subcommand("converge", "cell + limit + epsilon sweep");
  add_common(c_conv);
  CLI::App* c_lemma = app.add_subcommand("lemma31", "thin-rectangle scaling study");
  add_common(c_lemma);
  CLI::App* c_report = app.add_subcommand("report", "render report.json as text");
  c_report->add_option("--out", report_dir, "directory holding report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_report->parsed()) {
      std::string path = report_dir + "/report.json";
      if (!std::filesystem::exists(path)) {
        std::cerr << "no artifacts found in " << report_dir << "\n";
        return 1;
      }
      nlohmann::json rep = nlohmann::json::parse(read_text_file(path));
      std::cout << render_report(rep);
      return 0;
    }

    RunConfig cfg = parse_config(config_path);
    PipelineSelection sel;
    if (c_run->parsed()) {
      sel.cell = sel.limit = sel.sweep = sel.lemma = true;
    } else if (c_cell->parsed()) {
      sel.cell = true;
    } else if (c_limit->parsed()) {
      sel.cell = sel.limit = true;
    } else if (c_solve->parsed()) {
      sel.cell = sel.limit = true;
      double eps = eps_override > 0.0 ? eps_override : cfg.eps_list.front();
      if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("--eps must lie in (0, 1)");
      sel.single_eps = eps;
    } else if (c_conv->parsed()) {
      sel.cell = sel.limit = sel.sweep = true;
    } else if (c_lemma->parsed()) {
      sel.lemma = true;
    }
    return run_pipeline(cfg, sel, opt, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
