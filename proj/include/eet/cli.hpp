// cli.hpp: command-line front end: efficiency, sweep, phase, oracle and
// batch presets. Commands take a RunConfig and an output stream and return
// a process exit code:
//   0 success, 1 oracle threshold failed, 2 configuration error,
//   3 numerical failure.

#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eet/analytic.hpp"
#include "eet/config.hpp"
#include "eet/dynamics.hpp"
#include "eet/error.hpp"
#include "eet/io.hpp"
#include "eet/oracle.hpp"
#include "eet/sweep.hpp"

namespace eet::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalError = 3 };

/// Oracle pass threshold on the max population deviation.
inline constexpr double kOracleThreshold = 1e-8;

inline std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

inline std::string manifest_path(const std::string& path) { return path + ".manifest.json"; }

// ---------------------------------------------------------------------------
// efficiency

inline int cmd_efficiency(const RunConfig& cfg, std::ostream& out) {
  const ChainSpec spec = chain_spec(cfg);
  const double linear = efficiency_linear_solve(spec);
  TimeIntegrationOptions to;
  to.tol = cfg.tol;
  const auto timed = efficiency_time_integrated(spec, to);
  out << "eta_linear_solve = " << format_number(linear) << '\n';
  out << "eta_time_integrated = " << format_number(timed.eta) << '\n';
  out << "sink_population = " << format_number(timed.sink_population) << '\n';
  out << "stop_reason = " << (timed.reason == StopReason::ChainEmptied ? "chain_emptied" : "horizon")
      << " (t = " << format_number(timed.t_stop) << ")\n";
  out << "dev_linear_time = " << format_number(std::abs(linear - timed.eta)) << '\n';
  out << "dev_time_sink = " << format_number(std::abs(timed.eta - timed.sink_population)) << '\n';
  if (spec.n_sites == 2 && spec.edges.size() == 1) {
    TwoSiteParams p;
    p.v = spec.v;
    p.delta = spec.site_energies[0] - spec.site_energies[1];
    p.gamma_diss = spec.gamma_diss;
    p.gamma_deph = spec.gamma_deph;
    p.gamma_hop = spec.gamma_hop;
    p.lambda_sink = spec.lambda_sink;
    const double closed = eta_two_site(p);
    out << "eta_closed_form = " << format_number(closed) << '\n';
    out << "dev_linear_closed = " << format_number(std::abs(linear - closed)) << '\n';
    out << "dev_time_closed = " << format_number(std::abs(timed.eta - closed)) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

inline SweepTable run_sweep(const RunConfig& cfg) {
  SweepOptions so;
  so.workers = cfg.workers;
  return sweep_1d(chain_spec(cfg), sweep_request(cfg), so);
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const SweepTable table = run_sweep(cfg);
  std::ostringstream csv;
  write_sweep_csv(csv, table);
  if (!cfg.output) {
    out << csv.str();
    return kOk;
  }
  write_file(*cfg.output, csv.str());
  auto m = make_manifest("sweep", cfg, {*cfg.output});
  m["extrema"] = extrema_json(table);
  write_file(manifest_path(*cfg.output), m.dump(2) + "\n");
  out << "wrote " << *cfg.output << " (" << table.grid.size() << " rows, " << table.extrema.size()
      << " extrema)\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// phase

inline PhaseDiagram run_phase(const RunConfig& cfg) {
  if (cfg.c_points < 1 || cfg.delta_points < 1) throw ConfigError("phase: grid is empty");
  if (cfg.points_per_decade < 1) throw ConfigError("phase.points_per_decade: must be positive");
  PhaseOptions po;
  po.lambda_over_gamma = cfg.lambda_over_gamma;
  po.gamma_deph = cfg.phase_gamma_deph;
  po.v = cfg.v;
  po.points_per_decade = cfg.points_per_decade;
  po.workers = cfg.workers;
  try {
    return phase_diagram(make_grid(cfg.c_start, cfg.c_stop, cfg.c_points, GridScale::Linear),
                         make_grid(cfg.delta_start, cfg.delta_stop, cfg.delta_points, GridScale::Linear),
                         po);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("phase: ") + e.what());
  }
}

inline int cmd_phase(const RunConfig& cfg, std::ostream& out) {
  const PhaseDiagram pd = run_phase(cfg);
  std::ostringstream matrix, overlay;
  write_phase_csv(matrix, pd);
  write_overlay_csv(overlay, pd);
  if (!cfg.output) {
    out << matrix.str();
    return kOk;
  }
  const std::string overlay_path = sibling(*cfg.output, "_overlay.csv");
  write_file(*cfg.output, matrix.str());
  write_file(overlay_path, overlay.str());
  auto m = make_manifest("phase", cfg, {*cfg.output, overlay_path});
  m["label_encoding"] = {{"B", 0}, {"I", 1}, {"II", 2}, {"III", 3}};
  m["mismatches_away_from_boundaries"] = pd.mismatches_away_from_boundaries();
  write_file(manifest_path(*cfg.output), m.dump(2) + "\n");
  out << "wrote " << *cfg.output << " and " << overlay_path << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

inline int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const ChainSpec spec = chain_spec(cfg);
  if (spec.n_sites > oracle::kMaxChainSites)
    throw SizeLimitError("oracle supports n_sites <= " + std::to_string(oracle::kMaxChainSites));
  if (!(cfg.t_final > 0) || cfg.t_points < 1)
    throw ConfigError("run.t_final / run.t_points: need a positive horizon and at least one interval");
  const auto grid = oracle::uniform_time_grid(cfg.t_final, cfg.t_points);
  const double dev = oracle::compare_restriction(spec, grid, cfg.tol);
  const bool pass = dev <= kOracleThreshold;
  out << "max_population_deviation = " << format_number(dev) << '\n';
  out << "threshold = " << format_number(kOracleThreshold) << '\n';
  out << "verdict = " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// presets

enum class JobKind { Sweep, Phase, DipPosition, DipDepthVsRatio, DipDepthVsTotal };

struct PresetJob {
  std::string stem;  // output file stem
  JobKind kind;
  RunConfig config;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1a", "fig1b", "fig1c", "fig1d", "fig2",
                                              "fig3ab", "fig3c", "fig3d", "fig4", "fig5a",
                                              "fig5b", "fig5c", "fig5d"};
  return names;
}

namespace detail {

inline RunConfig hop_sweep(int n, double delta, double gamma_deph) {
  RunConfig c;
  c.n_sites = n;
  if (delta != 0.0) c.delta = delta;
  c.gamma_deph = gamma_deph;
  c.sweep_param = "gamma_hop";
  c.sweep_start = 1e-2;
  c.sweep_stop = 1e3;
  c.sweep_points = 1001;
  c.sweep_scale = "log";
  return c;
}

inline std::string tag(double x) { return format_number(x); }

}  // namespace detail

/// Jobs making up a preset. `n` restricts fig2 to one chain length,
/// `xi` restricts fig4 to one hop ratio.
inline std::vector<PresetJob> preset_jobs(const std::string& name, std::optional<int> n = {},
                                          std::optional<double> xi = {}) {
  using detail::hop_sweep;
  using detail::tag;
  std::vector<PresetJob> jobs;
  const std::vector<double> dephasings{0.0, 0.2};
  if (name == "fig1a" || name == "fig3c" || name == "fig3d") {
    const double delta = name == "fig1a" ? 0.0 : (name == "fig3c" ? 0.4 : 0.6);
    for (double g : dephasings)
      jobs.push_back({name + "_gamma" + tag(g), JobKind::Sweep, hop_sweep(2, delta, g)});
  } else if (name == "fig1b" || name == "fig1d") {
    for (double g : dephasings) {
      RunConfig c;
      c.gamma_deph = g;
      c.sweep_param = "c";
      c.sweep_start = 0.01;
      c.sweep_stop = 2.8;
      c.sweep_points = 280;
      c.sweep_scale = "linear";
      jobs.push_back({name + "_gamma" + tag(g),
                      name == "fig1b" ? JobKind::DipPosition : JobKind::DipDepthVsTotal, c});
    }
  } else if (name == "fig1c") {
    for (double g : dephasings) {
      RunConfig c;
      c.gamma_deph = g;
      c.sweep_param = "lambda_over_gamma";
      c.sweep_start = 1.0;
      c.sweep_stop = 100.0;
      c.sweep_points = 201;
      c.sweep_scale = "log";
      jobs.push_back({name + "_gamma" + tag(g), JobKind::DipDepthVsRatio, c});
    }
  } else if (name == "fig2") {
    std::vector<int> sizes{3, 5, 10, 20};
    if (n) sizes = {*n};
    for (int k : sizes) jobs.push_back({"fig2_n" + std::to_string(k), JobKind::Sweep, hop_sweep(k, 0, 0)});
  } else if (name == "fig3ab") {
    for (double g : dephasings) {
      RunConfig c;
      c.phase_gamma_deph = g;
      jobs.push_back({"fig3ab_gamma" + tag(g), JobKind::Phase, c});
    }
  } else if (name == "fig4") {
    std::vector<double> ratios{0.0, 1e-3, 1e-2, 1e-1};
    if (xi) ratios = {*xi};
    for (double r : ratios) {
      RunConfig c = hop_sweep(2, 5.0, 0.0);
      c.sweep_param = "gamma_deph";
      c.hop_ratio = r;
      jobs.push_back({"fig4_xi" + tag(r), JobKind::Sweep, c});
    }
  } else if (name == "fig5a" || name == "fig5b" || name == "fig5c" || name == "fig5d") {
    RunConfig c = hop_sweep(3, 10.0, 0.0);
    c.topology = "lambda";
    if (name == "fig5a") {
      c.delta.reset();
      c.sweep_param = "delta";
      c.sweep_start = 0.0;
      c.sweep_stop = 20.0;
      c.sweep_points = 401;
      c.sweep_scale = "linear";
    } else if (name == "fig5c" || name == "fig5d") {
      c.sweep_param = "gamma_deph";
      c.hop_ratio = name == "fig5c" ? 1e-3 : 0.0;
    }
    jobs.push_back({name, JobKind::Sweep, c});
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return jobs;
}

namespace detail {

/// (x, value, closed-form value) rows for the dip-characterization presets.
inline std::vector<std::vector<double>> dip_rows(const PresetJob& job) {
  const RunConfig& c = job.config;
  const GridScale scale = c.sweep_scale == "log" ? GridScale::Log : GridScale::Linear;
  std::vector<std::vector<double>> rows;
  for (double x : make_grid(c.sweep_start, c.sweep_stop, c.sweep_points, scale)) {
    TwoSiteParams p;
    p.v = c.v;
    p.gamma_deph = c.gamma_deph;
    if (job.kind == JobKind::DipDepthVsRatio) {
      p.gamma_diss = c.gamma_diss;
      p.lambda_sink = x * c.gamma_diss;
    } else {
      p.gamma_diss = x / (2.0 + c.lambda_over_gamma);
      p.lambda_sink = c.lambda_over_gamma * p.gamma_diss;
    }
    const auto dip = interior_dip(p);
    double value = NAN, closed = NAN;
    if (job.kind == JobKind::DipPosition) {
      if (dip) value = dip->location;
      if (auto loc = dip_location_uniform(p.gamma_diss, p.lambda_sink, p.gamma_deph, p.v)) closed = *loc;
    } else {
      if (dip) value = dip->relative_depth;
      if (p.gamma_deph == 0.0) {
        try {
          closed = dip_depth_closed_form(p.gamma_diss, p.lambda_sink, p.v);
        } catch (const NoDipError&) {
        }
      }
    }
    rows.push_back({x, value, closed});
  }
  return rows;
}

}  // namespace detail

/// Runs one preset job, writing files under `dir`. Returns written paths.
inline std::vector<std::string> run_preset_job(const PresetJob& job, const std::string& dir) {
  const std::string csv_path = (std::filesystem::path(dir) / (job.stem + ".csv")).string();
  std::vector<std::string> written{csv_path};
  std::ostringstream csv;
  nlohmann::ordered_json extra;
  switch (job.kind) {
    case JobKind::Sweep: {
      const SweepTable t = run_sweep(job.config);
      write_sweep_csv(csv, t);
      extra["extrema"] = extrema_json(t);
      break;
    }
    case JobKind::Phase: {
      const PhaseDiagram pd = run_phase(job.config);
      write_phase_csv(csv, pd);
      std::ostringstream overlay;
      write_overlay_csv(overlay, pd);
      const std::string overlay_path = sibling(csv_path, "_overlay.csv");
      write_file(overlay_path, overlay.str());
      written.push_back(overlay_path);
      extra["mismatches_away_from_boundaries"] = pd.mismatches_away_from_boundaries();
      break;
    }
    case JobKind::DipPosition:
      write_table_csv(csv, {"c", "dip_position", "dip_position_closed_form"}, detail::dip_rows(job));
      break;
    case JobKind::DipDepthVsRatio:
      write_table_csv(csv, {"lambda_over_gamma", "relative_depth", "relative_depth_closed_form"},
                      detail::dip_rows(job));
      break;
    case JobKind::DipDepthVsTotal:
      write_table_csv(csv, {"c", "relative_depth", "relative_depth_closed_form"}, detail::dip_rows(job));
      break;
  }
  write_file(csv_path, csv.str());
  auto m = make_manifest("preset " + job.stem, job.config, written);
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_file(manifest_path(csv_path), m.dump(2) + "\n");
  return written;
}

inline int cmd_preset(const std::string& name, std::optional<int> n, std::optional<double> xi,
                      const std::string& dir, int workers, std::ostream& out) {
  auto jobs = preset_jobs(name, n, xi);
  std::filesystem::create_directories(dir);
  for (auto& job : jobs) {
    job.config.workers = workers;
    for (const auto& path : run_preset_job(job, dir)) out << "wrote " << path << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// entry point

/// Runs `body`, mapping library errors to exit codes.
template <class Body>
int guarded(Body&& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SizeLimitError& e) {
    err << "size limit: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const PartialResultError& e) {
    err << "numerical failure: " << e.what() << " (eta >= " << format_number(e.lower_bound()) << ")\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Excitation transfer in dissipative spin chains", "eet"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> workers;
  std::optional<double> tol;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--output", output, "output path (directory for presets)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "integration tolerance");
  };
  auto* eff = app.add_subcommand("efficiency", "eta by linear solve, time integration and closed form");
  auto* swp = app.add_subcommand("sweep", "1-D efficiency sweep to CSV");
  auto* phs = app.add_subcommand("phase", "two-site extrema-count phase diagram to CSV");
  auto* orc = app.add_subcommand("oracle", "compare against the full-space evolution");
  auto* pre = app.add_subcommand("preset", "run a figure preset");
  for (auto* s : {eff, swp, phs, orc, pre}) common(s);
  std::string preset_name;
  std::optional<int> preset_n;
  std::optional<double> preset_xi;
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("--n", preset_n, "fig2: chain length");
  pre->add_option("--xi", preset_xi, "fig4: gamma_hop / gamma_deph ratio");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  return guarded(
      [&]() -> int {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (output) cfg.output = *output;
        if (workers) cfg.workers = *workers;
        if (tol) cfg.tol = *tol;
        if (eff->parsed()) return cmd_efficiency(cfg, out);
        if (swp->parsed()) return cmd_sweep(cfg, out);
        if (phs->parsed()) return cmd_phase(cfg, out);
        if (orc->parsed()) return cmd_oracle(cfg, out);
        return cmd_preset(preset_name, preset_n, preset_xi, cfg.output.value_or("."), cfg.workers, out);
      },
      err);
}

}  // namespace eet::cli
