// io.hpp: CSV tables and run manifests
//
// CSV files are UTF-8 with '\n' line endings and numbers printed with 12
// significant digits through fmt, which ignores the C locale.

#pragma once

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eet/config.hpp"
#include "eet/error.hpp"
#include "eet/sweep.hpp"

namespace eet {

inline constexpr const char* kVersion = "1.0.0";

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.12g}", x);
}

inline std::string format_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string("nan");
}

/// `param,eta` rows, then a comment block summarizing extrema and failures.
inline void write_sweep_csv(std::ostream& os, const SweepTable& t) {
  os << "param,eta\n";
  for (std::size_t i = 0; i < t.grid.size(); ++i)
    os << format_number(t.grid[i]) << ',' << format_number(t.eta[i]) << '\n';
  os << "# swept: " << t.param_name << '\n';
  os << "# extrema: " << t.extrema.size() << '\n';
  for (const auto& e : t.extrema)
    os << "# " << to_string(e.kind) << ",index=" << e.index
       << ",position=" << format_number(e.position) << ",value=" << format_number(e.value) << '\n';
  os << "# missing: " << t.missing() << '\n';
  for (std::size_t i = 0; i < t.errors.size(); ++i)
    if (!t.errors[i].empty()) os << "# row " << i << ": " << t.errors[i] << '\n';
}

inline int region_code(Region r) {
  switch (r) {
    case Region::B: return 0;
    case Region::I: return 1;
    case Region::II: return 2;
    case Region::III: return 3;
  }
  return -1;
}

/// Label matrix: header row of c values, then one row per delta.
/// Labels are encoded B=0, I=1, II=2, III=3.
inline void write_phase_csv(std::ostream& os, const PhaseDiagram& pd) {
  os << "delta\\c";
  for (double c : pd.c_grid) os << ',' << format_number(c);
  os << '\n';
  for (std::size_t i = 0; i < pd.rows(); ++i) {
    os << format_number(pd.delta_grid[i]);
    for (std::size_t j = 0; j < pd.cols(); ++j) os << ',' << region_code(pd.numeric_at(i, j));
    os << '\n';
  }
}

inline void write_overlay_csv(std::ostream& os, const PhaseDiagram& pd) {
  os << "delta,d_minus,d_plus\n";
  for (std::size_t i = 0; i < pd.rows(); ++i)
    os << format_number(pd.delta_grid[i]) << ',' << format_number(pd.overlay_minus[i]) << ','
       << format_number(pd.overlay_plus[i]) << '\n';
}

/// Generic numeric table with a header.
inline void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows) {
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << format_number(r[k]);
    os << '\n';
  }
}

/// Sidecar describing how an output file was produced. Contains no
/// timestamps, so repeated runs give identical bytes.
inline nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg,
                                            const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = "eet";
  m["version"] = kVersion;
  m["command"] = command;
  m["outputs"] = outputs;
  m["config"] = to_canonical(cfg);
  m["eigen"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  m["fmt"] = FMT_VERSION;
  m["compiler"] = __VERSION__;
  return m;
}

inline nlohmann::ordered_json extrema_json(const SweepTable& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : t.extrema)
    arr.push_back({{"kind", std::string(to_string(e.kind))},
                   {"index", e.index},
                   {"position", e.position},
                   {"value", e.value}});
  return arr;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  f << contents;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace eet
