#pragma once

#include <charconv>
#include <climits>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "thinhom/errors.hpp"
#include "thinhom/format.hpp"
#include "thinhom/profile.hpp"

namespace thinhom {

// Right-hand side of the 2D problem, a function of x1 only.
struct Forcing {
  enum class Kind { Cosine, Constant };

  Kind kind = Kind::Cosine;
  int k = 1;           // cosine mode: f(x1) = cos(k*pi*x1)
  double value = 1.0;  // constant level

  bool operator==(const Forcing&) const = default;
};

inline double forcing_value(const Forcing& f, double x1) {
  if (f.kind == Forcing::Kind::Cosine) return std::cos(f.k * std::numbers::pi * x1);
  return f.value;
}

// Dirichlet data for the thin-rectangle scaling study.
struct LayerData {
  enum class Kind { Linear, Constant };

  Kind kind = Kind::Linear;
  double value = 1.0;

  bool operator==(const LayerData&) const = default;
};

inline double layer_data_value(const LayerData& d, double x) {
  return d.kind == LayerData::Kind::Linear ? x : d.value;
}

inline double layer_data_derivative(const LayerData& d, double) {
  return d.kind == LayerData::Kind::Linear ? 1.0 : 0.0;
}

struct RunConfig {
  Profile g = Profile::constant(1.0);
  Profile h = Profile::constant(0.0);
  double alpha = 1.5;
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  Forcing forcing;
  int points_per_period = 16;
  int cell_nodes_per_period = 32;
  int grid_m = 256;
  long cell_cap = 2'000'000;
  double tol = 1e-10;
  int max_iter_factor = 20;
  double lemma31_alpha = 2.0;
  std::vector<double> lemma31_eps = {0.4, 0.3, 0.2};
  LayerData lemma31_u0;
  int layer_points = 32;
  std::string out_dir = "out";
  int workers = 0;
  bool deterministic = false;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::optional<double> to_double(const std::string& s) {
  double v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long> to_long(const std::string& s) {
  long v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Value grammar: name [ '(' name=value {',' name=value} ')' ] where a value is
// a number or a list of (number, number) tuples.
struct CallArg {
  std::string name;
  bool is_list = false;
  double number = 0.0;
  std::vector<std::pair<double, double>> list;
};

struct Call {
  std::string name;
  std::vector<CallArg> args;
};

struct Cursor {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool parse_ident(std::string& out) {
    skip_ws();
    size_t j = i;
    while (j < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[j])) != 0 || s[j] == '_')) {
      ++j;
    }
    if (j == i) return false;
    out = s.substr(i, j - i);
    i = j;
    return true;
  }
  bool parse_number(double& out) {
    skip_ws();
    auto res = std::from_chars(s.data() + i, s.data() + s.size(), out);
    if (res.ec != std::errc()) return false;
    i = static_cast<size_t>(res.ptr - s.data());
    return true;
  }
};

inline bool parse_call(const std::string& text, Call& out, std::string& err) {
  Cursor c{text};
  if (!c.parse_ident(out.name)) {
    err = "expected a name";
    return false;
  }
  if (c.done()) return true;
  if (!c.eat('(')) {
    err = "expected '('";
    return false;
  }
  if (c.eat(')')) {
    if (!c.done()) {
      err = "trailing characters";
      return false;
    }
    return true;
  }
  for (;;) {
    CallArg arg;
    if (!c.parse_ident(arg.name)) {
      err = "expected an argument name";
      return false;
    }
    if (!c.eat('=')) {
      err = "expected '=' after '" + arg.name + "'";
      return false;
    }
    c.skip_ws();
    if (c.i < text.size() && text[c.i] == '[') {
      arg.is_list = true;
      c.eat('[');
      if (!c.eat(']')) {
        for (;;) {
          double a = 0.0, b = 0.0;
          if (!c.eat('(') || !c.parse_number(a) || !c.eat(',') || !c.parse_number(b) ||
              !c.eat(')')) {
            err = "malformed tuple in '" + arg.name + "'";
            return false;
          }
          arg.list.push_back({a, b});
          if (c.eat(']')) break;
          if (!c.eat(',')) {
            err = "expected ',' or ']' in '" + arg.name + "'";
            return false;
          }
        }
      }
    } else if (!c.parse_number(arg.number)) {
      err = "expected a number for '" + arg.name + "'";
      return false;
    }
    out.args.push_back(std::move(arg));
    if (c.eat(')')) break;
    if (!c.eat(',')) {
      err = "expected ',' or ')'";
      return false;
    }
  }
  if (!c.done()) {
    err = "trailing characters";
    return false;
  }
  return true;
}

inline const CallArg* find_arg(const Call& call, const std::string& name) {
  for (const auto& a : call.args) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

inline void check_args(const Call& call, std::initializer_list<const char*> allowed,
                       const std::string& label, std::vector<std::string>& violations) {
  for (const auto& a : call.args) {
    bool known = false;
    for (const char* n : allowed) {
      if (a.name == n) {
        known = true;
        break;
      }
    }
    if (!known) violations.push_back(label + ": unknown argument '" + a.name + "'");
  }
}

inline bool arg_number(const Call& call, const std::string& name, const std::string& label,
                       std::vector<std::string>& violations, double& out) {
  const CallArg* a = find_arg(call, name);
  if (!a) return false;
  if (a->is_list) {
    violations.push_back(label + ": argument '" + name + "' must be a number");
    return false;
  }
  out = a->number;
  return true;
}

inline bool to_harmonics(const std::vector<std::pair<double, double>>& raw,
                         const std::string& label, const std::string& arg,
                         std::vector<std::string>& violations, std::vector<Harmonic>& out) {
  for (const auto& [amp, kf] : raw) {
    double r = std::round(kf);
    if (!(std::abs(kf - r) < 1e-9) || r < 1.0 || r > 1e6) {
      violations.push_back(label + ": " + arg + " frequencies must be positive integers");
      return false;
    }
    out.push_back({amp, static_cast<int>(r)});
  }
  return true;
}

inline std::optional<Profile> make_profile(const Call& call, const std::string& label,
                                           std::vector<std::string>& violations) {
  size_t before = violations.size();
  try {
    if (call.name == "constant") {
      check_args(call, {"value", "period"}, label, violations);
      double value = 0.0, period = 1.0;
      if (!arg_number(call, "value", label, violations, value)) {
        violations.push_back(label + ": constant requires value=<number>");
      }
      arg_number(call, "period", label, violations, period);
      if (violations.size() != before) return std::nullopt;
      return Profile::constant(value, period);
    }
    if (call.name == "cosine") {
      check_args(call, {"base", "terms", "sin_terms", "period"}, label, violations);
      double base = 0.0, period = 1.0;
      arg_number(call, "base", label, violations, base);
      arg_number(call, "period", label, violations, period);
      std::vector<Harmonic> cos_terms, sin_terms;
      if (const CallArg* a = find_arg(call, "terms")) {
        if (!a->is_list) {
          violations.push_back(label + ": 'terms' must be a list of (amplitude, k) tuples");
        } else {
          to_harmonics(a->list, label, "terms", violations, cos_terms);
        }
      }
      if (const CallArg* a = find_arg(call, "sin_terms")) {
        if (!a->is_list) {
          violations.push_back(label + ": 'sin_terms' must be a list of (amplitude, k) tuples");
        } else {
          to_harmonics(a->list, label, "sin_terms", violations, sin_terms);
        }
      }
      if (violations.size() != before) return std::nullopt;
      return Profile::cosine_series(base, std::move(cos_terms), std::move(sin_terms), period);
    }
    if (call.name == "pwlinear") {
      check_args(call, {"points", "period"}, label, violations);
      double period = 1.0;
      arg_number(call, "period", label, violations, period);
      const CallArg* pts = find_arg(call, "points");
      if (!pts || !pts->is_list) {
        violations.push_back(label + ": pwlinear requires points=[(x, y), ...]");
      }
      if (violations.size() != before) return std::nullopt;
      return Profile::piecewise_linear(pts->list, period);
    }
    violations.push_back(label + ": unknown profile type '" + call.name + "'");
    return std::nullopt;
  } catch (const ArgumentError& e) {
    violations.push_back(label + ": " + e.what());
    return std::nullopt;
  }
}

inline std::optional<Forcing> make_forcing(const Call& call, const std::string& label,
                                           std::vector<std::string>& violations) {
  size_t before = violations.size();
  if (call.name == "cosine") {
    check_args(call, {"k"}, label, violations);
    Forcing f;
    f.kind = Forcing::Kind::Cosine;
    double kf = 1.0;
    if (arg_number(call, "k", label, violations, kf)) {
      double r = std::round(kf);
      if (!(std::abs(kf - r) < 1e-9) || r < 1.0 || r > 1e6) {
        violations.push_back(label + ": k must be a positive integer");
      } else {
        f.k = static_cast<int>(r);
      }
    }
    if (violations.size() != before) return std::nullopt;
    return f;
  }
  if (call.name == "constant") {
    check_args(call, {"value"}, label, violations);
    Forcing f;
    f.kind = Forcing::Kind::Constant;
    if (!arg_number(call, "value", label, violations, f.value)) {
      violations.push_back(label + ": constant requires value=<number>");
    }
    if (violations.size() != before) return std::nullopt;
    return f;
  }
  violations.push_back(label + ": unknown forcing type '" + call.name + "'");
  return std::nullopt;
}

inline std::optional<LayerData> make_layer_data(const Call& call, const std::string& label,
                                                std::vector<std::string>& violations) {
  size_t before = violations.size();
  if (call.name == "linear") {
    check_args(call, {}, label, violations);
    if (violations.size() != before) return std::nullopt;
    return LayerData{LayerData::Kind::Linear, 1.0};
  }
  if (call.name == "constant") {
    check_args(call, {"value"}, label, violations);
    LayerData d;
    d.kind = LayerData::Kind::Constant;
    if (!arg_number(call, "value", label, violations, d.value)) {
      violations.push_back(label + ": constant requires value=<number>");
    }
    if (violations.size() != before) return std::nullopt;
    return d;
  }
  violations.push_back(label + ": unknown boundary data '" + call.name + "'");
  return std::nullopt;
}

inline std::optional<std::vector<double>> parse_double_list(const std::string& value,
                                                            const std::string& label,
                                                            std::vector<std::string>& violations) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= value.size()) {
    size_t comma = value.find(',', pos);
    std::string tok = trim(value.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos));
    auto v = to_double(tok);
    if (!v) {
      violations.push_back(label + ": '" + tok + "' is not a number");
      return std::nullopt;
    }
    out.push_back(*v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string write_harmonics(const std::vector<Harmonic>& terms) {
  std::string s = "[";
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) s += ", ";
    s += "(" + format_double(terms[i].amplitude) + ", " + std::to_string(terms[i].k) + ")";
  }
  return s + "]";
}

inline std::string write_double_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace detail

inline std::string write_profile(const Profile& p) {
  switch (p.kind()) {
    case ProfileKind::Constant:
      return "constant(value=" + format_double(p.base()) +
             ", period=" + format_double(p.period()) + ")";
    case ProfileKind::CosineSeries: {
      std::string s = "cosine(base=" + format_double(p.base());
      if (!p.cos_terms().empty()) s += ", terms=" + detail::write_harmonics(p.cos_terms());
      if (!p.sin_terms().empty()) s += ", sin_terms=" + detail::write_harmonics(p.sin_terms());
      return s + ", period=" + format_double(p.period()) + ")";
    }
    case ProfileKind::PiecewiseLinear: {
      std::string s = "pwlinear(points=[";
      const auto& pts = p.points();
      for (size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) s += ", ";
        s += "(" + format_double(pts[i].first) + ", " + format_double(pts[i].second) + ")";
      }
      return s + "], period=" + format_double(p.period()) + ")";
    }
  }
  return "constant(value=0)";
}

inline std::string write_forcing(const Forcing& f) {
  if (f.kind == Forcing::Kind::Cosine) return "cosine(k=" + std::to_string(f.k) + ")";
  return "constant(value=" + format_double(f.value) + ")";
}

inline std::string write_layer_data(const LayerData& d) {
  if (d.kind == LayerData::Kind::Linear) return "linear";
  return "constant(value=" + format_double(d.value) + ")";
}

inline std::string write_config(const RunConfig& c) {
  std::string s;
  s += "[profiles]\n";
  s += "g = " + write_profile(c.g) + "\n";
  s += "h = " + write_profile(c.h) + "\n";
  s += "\n[domain]\n";
  s += "alpha = " + format_double(c.alpha) + "\n";
  s += "eps = " + detail::write_double_list(c.eps_list) + "\n";
  s += "\n[forcing]\n";
  s += "f = " + write_forcing(c.forcing) + "\n";
  s += "\n[resolution]\n";
  s += "points_per_period = " + std::to_string(c.points_per_period) + "\n";
  s += "cell_nodes_per_period = " + std::to_string(c.cell_nodes_per_period) + "\n";
  s += "grid_m = " + std::to_string(c.grid_m) + "\n";
  s += "cell_cap = " + std::to_string(c.cell_cap) + "\n";
  s += "\n[solver]\n";
  s += "tol = " + format_double(c.tol) + "\n";
  s += "max_iter_factor = " + std::to_string(c.max_iter_factor) + "\n";
  s += "\n[lemma31]\n";
  s += "alpha = " + format_double(c.lemma31_alpha) + "\n";
  s += "eps = " + detail::write_double_list(c.lemma31_eps) + "\n";
  s += "u0 = " + write_layer_data(c.lemma31_u0) + "\n";
  s += "layer_points = " + std::to_string(c.layer_points) + "\n";
  s += "\n[output]\n";
  s += "out_dir = " + c.out_dir + "\n";
  s += "workers = " + std::to_string(c.workers) + "\n";
  s += std::string("deterministic = ") + (c.deterministic ? "true" : "false") + "\n";
  return s;
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> violations;

  auto set_double = [&](const std::string& value, const std::string& label, double& out) {
    auto v = detail::to_double(value);
    if (v) {
      out = *v;
    } else {
      violations.push_back(label + ": '" + value + "' is not a number");
    }
  };
  auto set_int = [&](const std::string& value, const std::string& label, int& out) {
    auto v = detail::to_long(value);
    if (v && *v >= INT_MIN && *v <= INT_MAX) {
      out = static_cast<int>(*v);
    } else {
      violations.push_back(label + ": '" + value + "' is not an integer");
    }
  };
  auto set_long = [&](const std::string& value, const std::string& label, long& out) {
    auto v = detail::to_long(value);
    if (v) {
      out = *v;
    } else {
      violations.push_back(label + ": '" + value + "' is not an integer");
    }
  };

  std::istringstream in(text);
  std::string line;
  std::string section;
  bool section_known = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t cpos = line.find_first_of("#;");
    if (cpos != std::string::npos) line.resize(cpos);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        violations.push_back("line " + std::to_string(lineno) + ": malformed section header");
        section_known = false;
        continue;
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      section_known = section == "profiles" || section == "domain" || section == "forcing" ||
                      section == "resolution" || section == "solver" || section == "lemma31" ||
                      section == "output";
      if (!section_known) violations.push_back("unknown section [" + section + "]");
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (section_known) {
        violations.push_back("line " + std::to_string(lineno) + ": expected key = value");
      }
      continue;
    }
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (!section_known) continue;
    std::string label = "[" + section + "] " + key;

    bool handled = true;
    if (section == "profiles" && (key == "g" || key == "h")) {
      detail::Call call;
      std::string err;
      if (!detail::parse_call(value, call, err)) {
        violations.push_back(label + ": " + err);
      } else if (auto p = detail::make_profile(call, label, violations)) {
        (key == "g" ? cfg.g : cfg.h) = *p;
      }
    } else if (section == "domain" && key == "alpha") {
      set_double(value, label, cfg.alpha);
    } else if (section == "domain" && key == "eps") {
      if (auto v = detail::parse_double_list(value, label, violations)) cfg.eps_list = *v;
    } else if (section == "forcing" && key == "f") {
      detail::Call call;
      std::string err;
      if (!detail::parse_call(value, call, err)) {
        violations.push_back(label + ": " + err);
      } else if (auto f = detail::make_forcing(call, label, violations)) {
        cfg.forcing = *f;
      }
    } else if (section == "resolution" && key == "points_per_period") {
      set_int(value, label, cfg.points_per_period);
    } else if (section == "resolution" && key == "cell_nodes_per_period") {
      set_int(value, label, cfg.cell_nodes_per_period);
    } else if (section == "resolution" && key == "grid_m") {
      set_int(value, label, cfg.grid_m);
    } else if (section == "resolution" && key == "cell_cap") {
      set_long(value, label, cfg.cell_cap);
    } else if (section == "solver" && key == "tol") {
      set_double(value, label, cfg.tol);
    } else if (section == "solver" && key == "max_iter_factor") {
      set_int(value, label, cfg.max_iter_factor);
    } else if (section == "lemma31" && key == "alpha") {
      set_double(value, label, cfg.lemma31_alpha);
    } else if (section == "lemma31" && key == "eps") {
      if (auto v = detail::parse_double_list(value, label, violations)) cfg.lemma31_eps = *v;
    } else if (section == "lemma31" && key == "u0") {
      detail::Call call;
      std::string err;
      if (!detail::parse_call(value, call, err)) {
        violations.push_back(label + ": " + err);
      } else if (auto d = detail::make_layer_data(call, label, violations)) {
        cfg.lemma31_u0 = *d;
      }
    } else if (section == "lemma31" && key == "layer_points") {
      set_int(value, label, cfg.layer_points);
    } else if (section == "output" && key == "out_dir") {
      cfg.out_dir = value;
    } else if (section == "output" && key == "workers") {
      set_int(value, label, cfg.workers);
    } else if (section == "output" && key == "deterministic") {
      if (value == "true") {
        cfg.deterministic = true;
      } else if (value == "false") {
        cfg.deterministic = false;
      } else {
        violations.push_back(label + ": expected true or false");
      }
    } else {
      handled = false;
    }
    if (!handled) {
      violations.push_back("unknown key '" + key + "' in section [" + section + "]");
    }
  }

  auto check_eps_list = [&](const std::vector<double>& eps, const std::string& label) {
    if (eps.empty()) {
      violations.push_back(label + " list must not be empty");
      return;
    }
    for (double e : eps) {
      if (!(e > 0.0 && e < 1.0)) {
        violations.push_back(label + " values must lie in (0, 1)");
        break;
      }
    }
    for (size_t i = 1; i < eps.size(); ++i) {
      if (!(eps[i] < eps[i - 1])) {
        violations.push_back(label + " list is not strictly decreasing");
        break;
      }
    }
  };

  if (!(cfg.g.min() > 0.0)) violations.push_back("profile g must be strictly positive");
  if (cfg.h.min() < 0.0) violations.push_back("profile h must be nonnegative");
  if (!(cfg.alpha > 1.0)) violations.push_back("alpha must be > 1");
  check_eps_list(cfg.eps_list, "eps");
  if (cfg.points_per_period < 4) violations.push_back("points_per_period must be at least 4");
  if (cfg.cell_nodes_per_period < 16) {
    violations.push_back("cell_nodes_per_period must be at least 16");
  }
  if (cfg.grid_m < 8) violations.push_back("grid_m must be at least 8");
  if (cfg.cell_cap < 1) violations.push_back("cell_cap must be positive");
  if (!(cfg.tol > 0.0)) violations.push_back("tol must be positive");
  if (cfg.max_iter_factor < 1) violations.push_back("max_iter_factor must be at least 1");
  if (!(cfg.lemma31_alpha > 1.0)) violations.push_back("lemma31 alpha must be > 1");
  check_eps_list(cfg.lemma31_eps, "lemma31 eps");
  if (cfg.layer_points < 4) violations.push_back("layer_points must be at least 4");
  if (cfg.workers < 0) violations.push_back("workers must be nonnegative");
  if (cfg.out_dir.empty()) violations.push_back("out_dir must not be empty");

  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline void write_config_file(const RunConfig& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file: " + path);
  out << write_config(c);
  if (!out) throw IoError("failed writing config file: " + path);
}

}  // namespace thinhom
