// config.hpp: flat sectioned key = value run configuration
//
//   # comment
//   [chain]
//   n_sites = 3
//   topology = lambda
//   delta = 10
//   [rates]
//   gamma_deph = 0.2
//
// Every key is optional. Unknown sections or keys and repeated keys are
// rejected. to_canonical() prints every field in a fixed order with
// shortest round-trip number formatting, so parse(to_canonical(c)) == c.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "eet/error.hpp"
#include "eet/model.hpp"
#include "eet/sweep.hpp"

namespace eet {

struct RunConfig {
  // [chain]
  int n_sites = 2;
  std::string topology = "line";  // line | lambda | custom
  std::vector<Edge> edges;         // topology = custom only
  std::optional<double> delta;     // omega_1 = delta, all other energies 0
  std::optional<std::vector<double>> site_energies;
  int init_site = 1;
  // [rates]
  double v = 1.0;
  double gamma_diss = 0.02;
  double lambda_sink = 0.2;
  double gamma_deph = 0.0;
  double gamma_hop = 0.0;
  // [sweep]
  std::string sweep_param = "gamma_hop";
  double sweep_start = 1e-2;
  double sweep_stop = 1e3;
  int sweep_points = 1001;
  std::string sweep_scale = "log";
  std::optional<double> hop_ratio;
  // [phase]
  double c_start = 0.03;
  double c_stop = 3.0;
  int c_points = 100;
  double delta_start = 0.0;
  double delta_stop = 0.99;
  int delta_points = 100;
  double lambda_over_gamma = 10.0;
  double phase_gamma_deph = 0.0;
  int points_per_decade = 200;
  // [run]
  double tol = 1e-10;
  int workers = 1;
  std::optional<std::string> output;
  double t_final = 100.0;
  int t_points = 200;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& key, std::string_view s) {
  double x = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite number, got '" + std::string(s) + "'");
  return x;
}

inline int parse_int(const std::string& key, std::string_view s) {
  int x = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + std::string(s) + "'");
  return x;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::optional<std::string>(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;

  std::string qualified() const { return section + "." + key; }
};

inline Field real(std::string section, std::string key, double RunConfig::*m) {
  const std::string q = section + "." + key;
  return {std::move(section), std::move(key),
          [m](const RunConfig& c) { return std::optional(format_double(c.*m)); },
          [m, q](RunConfig& c, const std::string& s) { c.*m = parse_double(q, s); }};
}

inline Field integer(std::string section, std::string key, int RunConfig::*m) {
  const std::string q = section + "." + key;
  return {std::move(section), std::move(key),
          [m](const RunConfig& c) { return std::optional(std::to_string(c.*m)); },
          [m, q](RunConfig& c, const std::string& s) { c.*m = parse_int(q, s); }};
}

inline Field text(std::string section, std::string key, std::string RunConfig::*m) {
  return {std::move(section), std::move(key), [m](const RunConfig& c) { return std::optional(c.*m); },
          [m](RunConfig& c, const std::string& s) { c.*m = s; }};
}

inline Field optional_real(std::string section, std::string key, std::optional<double> RunConfig::*m) {
  const std::string q = section + "." + key;
  return {std::move(section), std::move(key),
          [m](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return format_double(*(c.*m));
          },
          [m, q](RunConfig& c, const std::string& s) { c.*m = parse_double(q, s); }};
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(integer("chain", "n_sites", &RunConfig::n_sites));
    f.push_back(text("chain", "topology", &RunConfig::topology));
    f.push_back({"chain", "edges",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (c.edges.empty()) return std::nullopt;
                   std::string s;
                   for (const Edge& e : c.edges)
                     s += (s.empty() ? "" : ", ") + std::to_string(e.a) + "-" + std::to_string(e.b);
                   return s;
                 },
                 [](RunConfig& c, const std::string& s) {
                   c.edges.clear();
                   for (const auto& item : split_list(s)) {
                     const auto dash = item.find('-');
                     if (dash == std::string::npos)
                       throw ConfigError("chain.edges: expected a-b pairs, got '" + item + "'");
                     c.edges.push_back({parse_int("chain.edges", item.substr(0, dash)),
                                        parse_int("chain.edges", item.substr(dash + 1))});
                   }
                 }});
    f.push_back(optional_real("chain", "delta", &RunConfig::delta));
    f.push_back({"chain", "site_energies",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (!c.site_energies) return std::nullopt;
                   std::string s;
                   for (double w : *c.site_energies) s += (s.empty() ? "" : ", ") + format_double(w);
                   return s;
                 },
                 [](RunConfig& c, const std::string& s) {
                   std::vector<double> w;
                   for (const auto& item : split_list(s))
                     w.push_back(parse_double("chain.site_energies", item));
                   c.site_energies = std::move(w);
                 }});
    f.push_back(integer("chain", "init_site", &RunConfig::init_site));
    f.push_back(real("rates", "v", &RunConfig::v));
    f.push_back(real("rates", "gamma_diss", &RunConfig::gamma_diss));
    f.push_back(real("rates", "lambda_sink", &RunConfig::lambda_sink));
    f.push_back(real("rates", "gamma_deph", &RunConfig::gamma_deph));
    f.push_back(real("rates", "gamma_hop", &RunConfig::gamma_hop));
    f.push_back(text("sweep", "param", &RunConfig::sweep_param));
    f.push_back(real("sweep", "start", &RunConfig::sweep_start));
    f.push_back(real("sweep", "stop", &RunConfig::sweep_stop));
    f.push_back(integer("sweep", "points", &RunConfig::sweep_points));
    f.push_back(text("sweep", "scale", &RunConfig::sweep_scale));
    f.push_back(optional_real("sweep", "hop_ratio", &RunConfig::hop_ratio));
    f.push_back(real("phase", "c_start", &RunConfig::c_start));
    f.push_back(real("phase", "c_stop", &RunConfig::c_stop));
    f.push_back(integer("phase", "c_points", &RunConfig::c_points));
    f.push_back(real("phase", "delta_start", &RunConfig::delta_start));
    f.push_back(real("phase", "delta_stop", &RunConfig::delta_stop));
    f.push_back(integer("phase", "delta_points", &RunConfig::delta_points));
    f.push_back(real("phase", "lambda_over_gamma", &RunConfig::lambda_over_gamma));
    f.push_back(real("phase", "gamma_deph", &RunConfig::phase_gamma_deph));
    f.push_back(integer("phase", "points_per_decade", &RunConfig::points_per_decade));
    f.push_back(real("run", "tol", &RunConfig::tol));
    f.push_back(integer("run", "workers", &RunConfig::workers));
    f.push_back({"run", "output",
                 [](const RunConfig& c) { return c.output; },
                 [](RunConfig& c, const std::string& s) { c.output = s; }});
    f.push_back(real("run", "t_final", &RunConfig::t_final));
    f.push_back(integer("run", "t_points", &RunConfig::t_points));
    return f;
  }();
  return all;
}

}  // namespace config_detail

/// Parses configuration text. Throws ConfigError naming the offending key.
inline RunConfig parse_config(std::string_view text) {
  using namespace config_detail;
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& f : fields()) known = known || f.section == section;
      if (!known) throw ConfigError("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key + ": key outside of any section");
    const std::string q = section + "." + key;
    const Field* field = nullptr;
    for (const auto& f : fields())
      if (f.section == section && f.key == key) field = &f;
    if (!field) throw ConfigError(q + ": unknown key");
    if (!seen.insert(q).second) throw ConfigError(q + ": repeated key");
    field->set(cfg, value);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline std::string to_canonical(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : config_detail::fields()) {
    if (f.section != section) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    if (auto v = f.get(cfg)) out += f.key + " = " + *v + "\n";
  }
  return out;
}

/// Chain described by the [chain] and [rates] sections.
inline ChainSpec chain_spec(const RunConfig& cfg) {
  ChainSpec s;
  if (cfg.topology == "line") {
    s = ChainSpec::line(cfg.n_sites);
  } else if (cfg.topology == "lambda") {
    if (cfg.n_sites != 3) throw ConfigError("chain.topology: lambda requires n_sites = 3");
    s = ChainSpec::lambda();
  } else if (cfg.topology == "custom") {
    s = ChainSpec::line(cfg.n_sites);
    s.edges = cfg.edges;
  } else {
    throw ConfigError("chain.topology: expected line, lambda or custom, got '" + cfg.topology + "'");
  }
  if (cfg.topology != "custom" && !cfg.edges.empty())
    throw ConfigError("chain.edges: only allowed with topology = custom");
  if (cfg.delta && cfg.site_energies)
    throw ConfigError("chain.site_energies: cannot be combined with chain.delta");
  if (cfg.delta) s.with_delta(*cfg.delta);
  if (cfg.site_energies) s.site_energies = *cfg.site_energies;
  s.init_site = cfg.init_site;
  s.v = cfg.v;
  s.gamma_diss = cfg.gamma_diss;
  s.lambda_sink = cfg.lambda_sink;
  s.gamma_deph = cfg.gamma_deph;
  s.gamma_hop = cfg.gamma_hop;
  try {
    validate(s);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("chain: ") + e.what());
  }
  return s;
}

inline SweepRequest sweep_request(const RunConfig& cfg) {
  const auto param = parse_sweep_param(cfg.sweep_param);
  if (!param) throw ConfigError("sweep.param: unknown parameter '" + cfg.sweep_param + "'");
  GridScale scale;
  if (cfg.sweep_scale == "log")
    scale = GridScale::Log;
  else if (cfg.sweep_scale == "linear")
    scale = GridScale::Linear;
  else
    throw ConfigError("sweep.scale: expected log or linear, got '" + cfg.sweep_scale + "'");
  if (cfg.sweep_points < 1) throw ConfigError("sweep.points: grid is empty");
  SweepRequest r;
  r.param = *param;
  r.hop_ratio = cfg.hop_ratio;
  try {
    r.grid = make_grid(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points, scale);
    validate(r);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  return r;
}

}  // namespace eet
