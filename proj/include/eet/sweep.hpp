// sweep.hpp: 1-D parameter sweeps, extrema detection and the two-site
// extrema-count phase diagram.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "eet/analytic.hpp"
#include "eet/dynamics.hpp"
#include "eet/error.hpp"
#include "eet/model.hpp"
#include "eet/numeric.hpp"

namespace eet {

enum class SweepParam { GammaHop, GammaDeph, GammaDiss, LambdaSink, Delta, V };

inline std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::GammaHop: return "gamma_hop";
    case SweepParam::GammaDeph: return "gamma_deph";
    case SweepParam::GammaDiss: return "gamma_diss";
    case SweepParam::LambdaSink: return "lambda_sink";
    case SweepParam::Delta: return "delta";
    case SweepParam::V: return "v";
  }
  return "?";
}

inline std::optional<SweepParam> parse_sweep_param(std::string_view s) {
  for (auto p : {SweepParam::GammaHop, SweepParam::GammaDeph, SweepParam::GammaDiss,
                 SweepParam::LambdaSink, SweepParam::Delta, SweepParam::V})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

enum class GridScale { Linear, Log };

/// `points` values from start to stop inclusive. Linear grids are computed
/// as start + i * (stop - start) / (points - 1); log grids interpolate the
/// exponent the same way.
inline std::vector<double> make_grid(double start, double stop, int points, GridScale scale) {
  if (points < 1) throw PreconditionError("grid needs at least one point");
  if (points == 1) return {start};
  if (!(stop > start)) throw PreconditionError("grid stop must exceed start");
  std::vector<double> g(static_cast<std::size_t>(points));
  if (scale == GridScale::Linear) {
    for (int i = 0; i < points; ++i) g[i] = start + i * (stop - start) / (points - 1);
  } else {
    if (!(start > 0)) throw PreconditionError("log grid needs a positive start");
    const double a = std::log10(start), b = std::log10(stop);
    for (int i = 0; i < points; ++i) g[i] = std::pow(10.0, a + i * (b - a) / (points - 1));
  }
  g.front() = start;
  g.back() = stop;
  return g;
}

inline void check_strictly_increasing(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw PreconditionError(std::string(what) + " is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw PreconditionError(std::string(what) + " must be strictly increasing");
}

/// Which field a sweep varies. When hop_ratio is set, every point also gets
/// gamma_hop := hop_ratio * gamma_deph (a linked xi-sweep).
struct SweepRequest {
  SweepParam param = SweepParam::GammaHop;
  std::vector<double> grid;
  std::optional<double> hop_ratio;
};

inline void validate(const SweepRequest& r) {
  check_strictly_increasing(r.grid, "sweep grid");
  if (r.param != SweepParam::Delta && r.grid.front() < 0)
    throw PreconditionError(std::string(to_string(r.param)) + " sweep grid must be nonnegative");
  if (r.hop_ratio) {
    if (!(*r.hop_ratio >= 0)) throw PreconditionError("hop_ratio must be nonnegative");
    if (r.param == SweepParam::GammaHop)
      throw PreconditionError("hop_ratio links gamma_hop to gamma_deph; cannot sweep gamma_hop");
  }
}

/// spec with the swept parameter set to `value`. Delta sets omega_1 = value
/// and leaves other site energies as they are.
inline ChainSpec spec_at(ChainSpec spec, const SweepRequest& r, double value) {
  switch (r.param) {
    case SweepParam::GammaHop: spec.gamma_hop = value; break;
    case SweepParam::GammaDeph: spec.gamma_deph = value; break;
    case SweepParam::GammaDiss: spec.gamma_diss = value; break;
    case SweepParam::LambdaSink: spec.lambda_sink = value; break;
    case SweepParam::V: spec.v = value; break;
    case SweepParam::Delta:
      if (spec.site_energies.size() != static_cast<std::size_t>(spec.n_sites))
        spec.site_energies.assign(static_cast<std::size_t>(spec.n_sites), 0.0);
      spec.site_energies.front() = value;
      break;
  }
  if (r.hop_ratio) spec.gamma_hop = *r.hop_ratio * spec.gamma_deph;
  return spec;
}

enum class ExtremumKind { Min, Max };

inline std::string_view to_string(ExtremumKind k) { return k == ExtremumKind::Min ? "min" : "max"; }

struct Extremum {
  std::size_t index;  // grid index of the discrete extremum
  ExtremumKind kind;
  double position;  // refined argument, inside [grid[index-1], grid[index+1]]
  double value;     // refined efficiency
};

struct SweepTable {
  std::string param_name;
  std::vector<double> grid;
  std::vector<std::optional<double>> eta;  // empty where the point failed
  std::vector<std::string> errors;         // failure reason per row, "" if fine
  std::vector<Extremum> extrema;

  std::size_t missing() const {
    return static_cast<std::size_t>(std::count(eta.begin(), eta.end(), std::nullopt));
  }
};

using EtaFunction = std::function<double(double)>;

/// Differences smaller than this are treated as flat.
inline constexpr double kExtremaNoiseFloor = 1e-12;

/// Interior extrema of a sampled curve. Signs of first differences above the
/// noise floor are compared between neighbouring non-flat segments; every sign
/// change marks an extremum whose kind follows the second difference there.
/// If `refine` is given, each one is polished by golden-section search on the
/// continuous function within the bracketing cell.
inline std::vector<Extremum> find_extrema(const std::vector<double>& grid,
                                          const std::vector<std::optional<double>>& eta,
                                          const EtaFunction& refine = {},
                                          double noise_floor = kExtremaNoiseFloor) {
  if (grid.size() != eta.size()) throw PreconditionError("grid and eta sizes differ");
  if (grid.size() < 5) throw PreconditionError("find_extrema needs at least 5 grid points");

  std::vector<std::size_t> idx;  // rows with values
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (eta[i]) idx.push_back(i);
  std::vector<Extremum> out;
  if (idx.size() < 3) return out;

  const auto y = [&](std::size_t k) { return *eta[idx[k]]; };
  int prev_sign = 0;
  std::size_t prev_end = 0;  // position in idx where the last non-flat segment ended
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const double d = y(k + 1) - y(k);
    const int s = d > noise_floor ? 1 : (d < -noise_floor ? -1 : 0);
    if (s == 0) continue;
    if (prev_sign != 0 && s != prev_sign) {
      // Vertex: extreme value among the (possibly flat) run prev_end..k.
      std::size_t v = prev_end;
      for (std::size_t j = prev_end; j <= k; ++j)
        if (prev_sign > 0 ? y(j) > y(v) : y(j) < y(v)) v = j;
      const double second = y(v + 1) - 2 * y(v) + y(v - 1);
      ExtremumKind kind = prev_sign < 0 ? ExtremumKind::Min : ExtremumKind::Max;
      if (second > 0)
        kind = ExtremumKind::Min;
      else if (second < 0)
        kind = ExtremumKind::Max;
      Extremum e{idx[v], kind, grid[idx[v]], y(v)};
      if (refine) {
        const double lo = grid[idx[v - 1]], hi = grid[idx[v + 1]];
        const double sign = kind == ExtremumKind::Min ? 1.0 : -1.0;
        const auto m = numeric::golden_section_minimize(
            [&](double x) { return sign * refine(x); }, lo, hi, 1e-12);
        if (m.value <= sign * e.value) {
          e.position = m.x;
          e.value = sign * m.value;
        }
      }
      out.push_back(e);
    }
    prev_sign = s;
    prev_end = k + 1;
  }
  return out;
}

inline std::vector<Extremum> find_extrema(const SweepTable& t, const EtaFunction& refine = {}) {
  return find_extrema(t.grid, t.eta, refine);
}

/// Runs body(i) for i in [0, n) on `workers` threads with a static
/// round-robin partition. Results must be written to slot i by the caller.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) body(i);
    });
  for (auto& th : pool) th.join();
}

struct SweepOptions {
  int workers = 1;
  bool refine = true;
};

/// eta at every grid point via the linear-solve efficiency. Failed points are
/// left empty with the reason recorded; extrema are attached when the grid
/// has at least 5 points.
inline SweepTable sweep_1d(const ChainSpec& spec, const SweepRequest& request,
                           const SweepOptions& opts = {}) {
  validate(spec);
  validate(request);
  SweepTable t;
  t.param_name = std::string(to_string(request.param));
  if (request.hop_ratio) t.param_name += "(gamma_hop=xi*gamma_deph)";
  t.grid = request.grid;
  t.eta.assign(t.grid.size(), std::nullopt);
  t.errors.assign(t.grid.size(), "");
  parallel_for(t.grid.size(), opts.workers, [&](std::size_t i) {
    try {
      t.eta[i] = efficiency_linear_solve(spec_at(spec, request, t.grid[i]));
    } catch (const std::exception& e) {
      t.errors[i] = e.what();
    }
  });
  if (t.grid.size() >= 5) {
    EtaFunction f;
    if (opts.refine)
      f = [&](double x) { return efficiency_linear_solve(spec_at(spec, request, x)); };
    t.extrema = find_extrema(t, f);
  }
  return t;
}

/// Extrema-count classification of eta(gamma_h) for N = 2 over
/// (c = 2 Gamma + Lambda, delta), with Lambda / Gamma fixed.
struct PhaseOptions {
  double lambda_over_gamma = 10.0;
  double gamma_deph = 0.0;
  double v = 1.0;
  double gamma_hop_min = 1e-3;
  double gamma_hop_max = 1e3;
  int points_per_decade = 200;
  bool refine = true;
  int workers = 1;
};

struct PhaseDiagram {
  std::vector<double> c_grid;
  std::vector<double> delta_grid;
  // Row-major, rows follow delta_grid, columns follow c_grid.
  std::vector<Region> numeric;
  std::vector<Region> analytic;
  std::vector<int> extrema_counts;
  // Analytic boundaries on the c axis (D_pm - 2 gamma), per delta.
  std::vector<std::optional<double>> overlay_minus;
  std::vector<std::optional<double>> overlay_plus;

  std::size_t cols() const { return c_grid.size(); }
  std::size_t rows() const { return delta_grid.size(); }
  Region numeric_at(std::size_t i_delta, std::size_t j_c) const { return numeric[i_delta * cols() + j_c]; }
  Region analytic_at(std::size_t i_delta, std::size_t j_c) const { return analytic[i_delta * cols() + j_c]; }

  /// True if the analytic label changes somewhere in the 3x3 neighbourhood.
  bool near_boundary(std::size_t i, std::size_t j) const {
    const Region r = analytic_at(i, j);
    for (std::size_t a = i == 0 ? 0 : i - 1; a <= std::min(i + 1, rows() - 1); ++a)
      for (std::size_t b = j == 0 ? 0 : j - 1; b <= std::min(j + 1, cols() - 1); ++b)
        if (analytic_at(a, b) != r) return true;
    return false;
  }

  /// Cells where numeric and analytic labels differ more than one cell away
  /// from an analytic boundary.
  std::size_t mismatches_away_from_boundaries() const {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j)
        if (numeric_at(i, j) != analytic_at(i, j) && !near_boundary(i, j)) ++bad;
    return bad;
  }
};

inline TwoSiteParams phase_cell_params(double c, double delta, const PhaseOptions& o) {
  TwoSiteParams p;
  p.v = o.v;
  p.delta = delta;
  p.gamma_diss = c / (2.0 + o.lambda_over_gamma);
  p.lambda_sink = o.lambda_over_gamma * p.gamma_diss;
  p.gamma_deph = o.gamma_deph;
  return p;
}

/// Number of interior extrema of eta(gamma_h) for one phase-diagram cell.
inline int count_extrema_two_site(const TwoSiteParams& base, const PhaseOptions& o) {
  const int decades =
      static_cast<int>(std::lround(std::log10(o.gamma_hop_max / o.gamma_hop_min)));
  const auto grid = make_grid(o.gamma_hop_min, o.gamma_hop_max,
                              std::max(5, decades * o.points_per_decade + 1), GridScale::Log);
  TwoSiteParams p = base;
  const auto eta = [&](double gh) {
    p.gamma_hop = gh;
    return eta_two_site(p);
  };
  std::vector<std::optional<double>> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = eta(grid[i]);
  EtaFunction f;
  if (o.refine) f = eta;
  return static_cast<int>(find_extrema(grid, values, f).size());
}

inline Region region_from_count(int count, double delta, double v) {
  if (count >= 2) return Region::I;
  if (count == 1) return Region::II;
  return std::abs(delta) >= v / 2 ? Region::B : Region::III;
}

inline PhaseDiagram phase_diagram(const std::vector<double>& c_grid,
                                  const std::vector<double>& delta_grid,
                                  const PhaseOptions& opts = {}) {
  check_strictly_increasing(c_grid, "c grid");
  check_strictly_increasing(delta_grid, "delta grid");
  if (!(c_grid.front() > 0)) throw PreconditionError("c grid must be positive");
  if (!(opts.gamma_deph >= 0)) throw PreconditionError("gamma_deph must be nonnegative");

  PhaseDiagram pd;
  pd.c_grid = c_grid;
  pd.delta_grid = delta_grid;
  const std::size_t rows = delta_grid.size(), cols = c_grid.size();
  pd.numeric.resize(rows * cols);
  pd.analytic.resize(rows * cols);
  pd.extrema_counts.resize(rows * cols);
  for (double d : delta_grid) {
    const auto b = stationary_boundaries(d, opts.v);
    pd.overlay_minus.push_back(b ? std::optional(b->first - 2 * opts.gamma_deph) : std::nullopt);
    pd.overlay_plus.push_back(b ? std::optional(b->second - 2 * opts.gamma_deph) : std::nullopt);
  }
  parallel_for(rows * cols, opts.workers, [&](std::size_t k) {
    const std::size_t i = k / cols, j = k % cols;
    const double c = c_grid[j], d = delta_grid[i];
    const int n = count_extrema_two_site(phase_cell_params(c, d, opts), opts);
    pd.extrema_counts[k] = n;
    pd.numeric[k] = region_from_count(n, d, opts.v);
    pd.analytic[k] = classify_region(d, c + 2 * opts.gamma_deph, opts.v).region;
  });
  return pd;
}

/// Default phase-diagram axes: c = 0.03, 0.06, ..., 3.0 and delta = 0, 0.01, ..., 0.99.
inline std::vector<double> default_c_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 100; ++i) g.push_back(i * 3.0 / 100.0);
  return g;
}

inline std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int i = 0; i < 100; ++i) g.push_back(i / 100.0);
  return g;
}

}  // namespace eet
