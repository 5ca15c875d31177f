#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinhom/cell_problem.hpp"
#include "thinhom/errors.hpp"
#include "thinhom/format.hpp"
#include "thinhom/mesh.hpp"
#include "thinhom/numerics.hpp"
#include "thinhom/verify.hpp"
#include "thinhom/version.hpp"

namespace thinhom {

constexpr int kSchemaVersion = 1;

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);
}

// All artifact files are written in binary mode with LF line endings so two
// runs of the same input compare byte for byte.
inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("failed writing: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string u0_csv(const std::vector<double>& u0) {
  if (u0.size() < 2) throw ArgumentError("u0_csv: need at least 2 samples");
  std::string s = "x,u0\n";
  size_t m = u0.size() - 1;
  for (size_t i = 0; i < u0.size(); ++i) {
    s += format_double(static_cast<double>(i) / static_cast<double>(m)) + "," +
         format_double(u0[i]) + "\n";
  }
  return s;
}

inline std::string convergence_csv(const std::vector<EpsilonRun>& runs) {
  std::string s = "epsilon,abs_err,rel_err,u_l2,du1_l2,du2_scaled_l2,cells,iterations\n";
  for (const auto& r : runs) {
    s += format_double(r.epsilon) + "," + format_double(r.abs_err) + "," +
         format_double(r.rel_err) + "," + format_double(r.norms.u_l2) + "," +
         format_double(r.norms.du1_l2) + "," + format_double(r.norms.du2_scaled_l2) + "," +
         std::to_string(r.cells) + "," + std::to_string(r.iterations) + "\n";
  }
  return s;
}

inline std::string lemma31_csv(const std::vector<LayerRun>& runs) {
  std::string s = "epsilon,lhs37,energy38,ratio37,ratio38\n";
  for (const auto& r : runs) {
    s += format_double(r.epsilon) + "," + format_double(r.mean_deviation_sq) + "," +
         format_double(r.energy) + "," + format_double(r.ratio_mean) + "," +
         format_double(r.ratio_energy) + "\n";
  }
  return s;
}

inline std::string tabulated_csv(const Tabulated& t, const std::string& x_name,
                                 const std::string& y_name) {
  std::string s = x_name + "," + y_name + "\n";
  for (size_t i = 0; i < t.xs().size(); ++i) {
    s += format_double(t.xs()[i]) + "," + format_double(t.ys()[i]) + "\n";
  }
  return s;
}

inline std::string mesh_nodes_csv(const Mesh& mesh) {
  std::string s = "id,x1,x2\n";
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    s += std::to_string(i) + "," + format_double(mesh.nodes[i][0]) + "," +
         format_double(mesh.nodes[i][1]) + "\n";
  }
  return s;
}

inline std::string mesh_triangles_csv(const Mesh& mesh) {
  std::string s = "id,v0,v1,v2\n";
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    s += std::to_string(i) + "," + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
         std::to_string(t[2]) + "\n";
  }
  return s;
}

inline std::string mesh_boundary_csv(const Mesh& mesh) {
  std::string s = "a,b,tag\n";
  for (const auto& e : mesh.boundary_edges) {
    s += std::to_string(e.a) + "," + std::to_string(e.b) + "," + edge_tag_name(e.tag) + "\n";
  }
  return s;
}

inline nlohmann::json coefficients_json(const Homogenized& hom) {
  return {
      {"schema_version", kSchemaVersion},
      {"version", version_string()},
      {"q_hat", hom.q_hat},
      {"q_hat_error_bar", hom.q_hat_error_bar},
      {"p", hom.p},
      {"area_ratio", hom.area_ratio},
      {"mass_coeff", hom.mass_coeff()},
      {"q_flux_coarse", hom.q_flux_coarse},
      {"q_flux_fine", hom.q_flux_fine},
      {"q_energy_fine", hom.q_energy_fine},
      {"npp_coarse", hom.npp_coarse},
      {"npp_fine", hom.npp_fine},
      {"iterations", hom.iterations},
  };
}

inline nlohmann::json epsilon_run_json(const EpsilonRun& r) {
  nlohmann::json j = {
      {"epsilon", r.epsilon},
      {"nx", r.nx},
      {"ny", r.ny},
      {"cells", r.cells},
      {"abs_err", r.abs_err},
      {"rel_err", r.rel_err},
      {"u_l2", r.norms.u_l2},
      {"du1_l2", r.norms.du1_l2},
      {"du2_scaled_l2", r.norms.du2_scaled_l2},
      {"iterations", r.iterations},
      {"final_residual", r.final_residual},
  };
  if (r.fhat_gap >= 0.0) j["fhat_gap"] = r.fhat_gap;
  return j;
}

inline nlohmann::json layer_run_json(const LayerRun& r) {
  return {
      {"epsilon", r.epsilon},
      {"nx", r.nx},
      {"ny", r.ny},
      {"u0_bar", r.u0_bar},
      {"lhs37", r.mean_deviation_sq},
      {"energy38", r.energy},
      {"ratio37", r.ratio_mean},
      {"ratio38", r.ratio_energy},
      {"iterations", r.iterations},
  };
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

namespace detail {

inline std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size() + 1, ' ');
}

inline std::string num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return "-";
  if (j[key].is_number_integer()) return std::to_string(j[key].get<long>());
  return format_double(j[key].get<double>());
}

}  // namespace detail

// Plain-text view of report.json for the terminal.
inline std::string render_report(const nlohmann::json& rep) {
  std::ostringstream out;
  out << "version: " << rep.value("version", std::string("unknown")) << "\n";
  out << "schema_version: " << rep.value("schema_version", 0) << "\n";

  if (rep.contains("coefficients")) {
    const auto& c = rep["coefficients"];
    out << "\neffective coefficients\n";
    out << "  q_hat      = " << detail::num(c, "q_hat") << " +/- "
        << detail::num(c, "q_hat_error_bar") << "\n";
    out << "  p          = " << detail::num(c, "p") << "\n";
    out << "  area_ratio = " << detail::num(c, "area_ratio") << "\n";
    out << "  mass_coeff = " << detail::num(c, "mass_coeff") << "\n";
  }

  if (rep.contains("convergence") && rep["convergence"].contains("runs")) {
    out << "\nepsilon sweep\n";
    out << "  " << detail::pad("epsilon", 10) << detail::pad("rel_err", 14)
        << detail::pad("abs_err", 14) << detail::pad("cells", 9) << "iterations\n";
    for (const auto& r : rep["convergence"]["runs"]) {
      out << "  " << detail::pad(detail::num(r, "epsilon"), 10)
          << detail::pad(detail::num(r, "rel_err"), 14)
          << detail::pad(detail::num(r, "abs_err"), 14) << detail::pad(detail::num(r, "cells"), 9)
          << detail::num(r, "iterations") << "\n";
    }
    const auto& c = rep["convergence"];
    if (c.contains("slope")) out << "  log-log slope: " << detail::num(c, "slope") << "\n";
    if (c.contains("apriori_factor")) {
      out << "  norm growth factor: " << detail::num(c, "apriori_factor") << "\n";
    }
    if (c.contains("failures")) {
      for (const auto& f : c["failures"]) out << "  failed: " << f.get<std::string>() << "\n";
    }
  }

  if (rep.contains("lemma31") && rep["lemma31"].contains("runs")) {
    out << "\nthin-layer scaling\n";
    out << "  " << detail::pad("epsilon", 10) << detail::pad("lhs37", 14)
        << detail::pad("energy38", 14) << detail::pad("ratio37", 12) << "ratio38\n";
    for (const auto& r : rep["lemma31"]["runs"]) {
      out << "  " << detail::pad(detail::num(r, "epsilon"), 10)
          << detail::pad(detail::num(r, "lhs37"), 14) << detail::pad(detail::num(r, "energy38"), 14)
          << detail::pad(detail::num(r, "ratio37"), 12) << detail::num(r, "ratio38") << "\n";
    }
  }

  size_t passed = 0, total = 0;
  if (rep.contains("verdicts")) {
    out << "\nverdicts\n";
    for (const auto& v : rep["verdicts"]) {
      bool ok = v.value("passed", false);
      ++total;
      if (ok) ++passed;
      out << "  " << (ok ? "PASS " : "FAIL ") << v.value("name", std::string("?"));
      std::string details = v.value("details", std::string());
      if (!details.empty()) out << ": " << details;
      out << "\n";
    }
    out << "\noverall: " << (passed == total ? "PASS" : "FAIL") << " (" << passed << "/" << total
        << ")\n";
  }
  return out.str();
}

}  // namespace thinhom
