// oracle.hpp: brute-force check of the single-excitation restriction
//
// Evolves the unrestricted master equation on all N+1 spins (chain plus
// sink), 2^(N+1) basis states, with every jump term written through spin
// raising/lowering operators, including the recycling terms
// sigma^- rho sigma^+ that the restricted model drops. The right-hand side is
// evaluated in matrix form, not through a vectorized superoperator.

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <optional>
#include <vector>

#include "eet/dynamics.hpp"
#include "eet/error.hpp"
#include "eet/model.hpp"
#include "eet/ode.hpp"

namespace eet::oracle {

inline constexpr int kMaxChainSites = 4;

struct Jump {
  CMatrix op;
  double rate;
};

/// Hamiltonian and jump operators on the full spin space. Bit k of a basis
/// index is spin k (0-based); bit N is the sink.
struct FullSpaceModel {
  int n_qubits = 0;
  CMatrix hamiltonian;
  std::vector<Jump> jumps;

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
};

namespace detail {

/// sigma^-_k : |..1_k..> -> |..0_k..>
inline CMatrix lowering(int k, int n_qubits) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  CMatrix m = CMatrix::Zero(d, d);
  for (Eigen::Index s = 0; s < d; ++s)
    if (s >> k & 1) m(s & ~(Eigen::Index{1} << k), s) = 1.0;
  return m;
}

}  // namespace detail

inline void check_size(const ChainSpec& spec) {
  if (spec.n_sites > kMaxChainSites)
    throw SizeLimitError("full-space oracle supports at most " + std::to_string(kMaxChainSites) +
                         " chain sites, got " + std::to_string(spec.n_sites));
}

inline FullSpaceModel build_full_space(const ChainSpec& spec) {
  validate(spec);
  check_size(spec);
  FullSpaceModel m;
  m.n_qubits = spec.n_sites + 1;
  const int nq = m.n_qubits;
  std::vector<CMatrix> lo, hi;
  for (int k = 0; k < nq; ++k) {
    lo.push_back(detail::lowering(k, nq));
    hi.push_back(lo.back().adjoint());
  }
  const Eigen::Index d = m.dim();
  m.hamiltonian = CMatrix::Zero(d, d);
  for (int k = 0; k < spec.n_sites; ++k) m.hamiltonian += spec.site_energies[k] * hi[k] * lo[k];
  for (const Edge& e : spec.edges) {
    const int a = e.a - 1, b = e.b - 1;
    m.hamiltonian += spec.v * (hi[a] * lo[b] + hi[b] * lo[a]);
  }

  const auto add = [&](CMatrix op, double rate) {
    if (rate > 0.0) m.jumps.push_back({std::move(op), rate});
  };
  for (int k = 0; k < spec.n_sites; ++k) {
    add(lo[k], spec.gamma_diss);
    add(hi[k] * lo[k], spec.gamma_deph);
  }
  for (const Edge& e : spec.edges) {
    const int a = e.a - 1, b = e.b - 1;
    add(hi[b] * lo[a], spec.gamma_hop);
    add(hi[a] * lo[b], spec.gamma_hop);
  }
  const int last = spec.n_sites - 1, sink = spec.n_sites;
  add(hi[sink] * lo[last], spec.lambda_sink);
  return m;
}

/// Populations of the unrestricted evolution on a time grid.
struct FullSpaceResult {
  std::vector<double> times;
  Eigen::MatrixXd populations;  // rows: times, cols: chain sites then sink
  std::vector<double> multi_excitation_weight;  // population with >= 2 excitations
  std::vector<double> hermiticity_error;
  std::vector<double> min_eigenvalue;
};

inline void check_time_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw PreconditionError("time grid is empty");
  if (t_grid.front() < 0) throw PreconditionError("time grid must be nonnegative");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw PreconditionError("time grid must be strictly increasing");
}

/// Integrates the full master equation from one excitation on init_site.
inline FullSpaceResult full_space_evolve(const ChainSpec& spec, const std::vector<double>& t_grid,
                                         double tol = 1e-10) {
  check_time_grid(t_grid);
  const FullSpaceModel model = build_full_space(spec);
  const Eigen::Index d = model.dim();

  CMatrix damping = CMatrix::Zero(d, d);
  for (const auto& j : model.jumps) damping += j.rate * j.op.adjoint() * j.op;
  const CMatrix h_eff = model.hamiltonian - cd(0.0, 0.5) * damping;
  const CMatrix h_eff_adj = h_eff.adjoint();
  std::vector<CMatrix> jump_adj;
  for (const auto& j : model.jumps) jump_adj.push_back(j.op.adjoint());

  const auto rhs = [&](double, const CVector& y, CVector& dy) {
    const Eigen::Map<const CMatrix> rho(y.data(), d, d);
    Eigen::Map<CMatrix> out(dy.data(), d, d);
    out.noalias() = cd(0.0, -1.0) * (h_eff * rho);
    out.noalias() += cd(0.0, 1.0) * (rho * h_eff_adj);
    for (std::size_t k = 0; k < model.jumps.size(); ++k)
      out.noalias() += model.jumps[k].rate * (model.jumps[k].op * rho * jump_adj[k]);
  };

  CMatrix rho0 = CMatrix::Zero(d, d);
  const Eigen::Index start = Eigen::Index{1} << (spec.init_site - 1);
  rho0(start, start) = 1.0;

  FullSpaceResult res;
  const int n_sites = model.n_qubits;
  res.populations.resize(static_cast<Eigen::Index>(t_grid.size()), n_sites);
  const auto record = [&](double t, const CVector& y) {
    const Eigen::Map<const CMatrix> rho(y.data(), d, d);
    const auto row = static_cast<Eigen::Index>(res.times.size());
    double multi = 0.0;
    for (int k = 0; k < n_sites; ++k) res.populations(row, k) = 0.0;
    for (Eigen::Index s = 0; s < d; ++s) {
      const double p = rho(s, s).real();
      for (int k = 0; k < n_sites; ++k)
        if (s >> k & 1) res.populations(row, k) += p;
      if (std::popcount(static_cast<unsigned long long>(s)) >= 2) multi += p;
    }
    res.times.push_back(t);
    res.multi_excitation_weight.push_back(multi);
    const DensityMatrix dm(rho, Representation::ChainWithSink);
    res.hermiticity_error.push_back(dm.hermiticity_error());
    res.min_eigenvalue.push_back(dm.min_eigenvalue());
  };

  std::size_t next = 0;
  const CVector y0 = vectorize(rho0);
  while (next < t_grid.size() && t_grid[next] == 0.0) record(t_grid[next++], y0);
  if (next == t_grid.size()) return res;

  ode::Options o;
  o.rtol = tol;
  o.atol = tol;
  const auto observer = [&](const ode::DenseStep<CVector>& step) {
    while (next < t_grid.size() && t_grid[next] <= step.t_new) {
      record(t_grid[next], t_grid[next] == step.t_new ? *step.y_new : step(t_grid[next]));
      ++next;
    }
    return next < t_grid.size();
  };
  ode::integrate(rhs, 0.0, y0, t_grid.back(), o, observer);
  return res;
}

/// Max over times and sites (sink included) of |full - restricted| population.
/// `restricted` overrides the chain+sink generator built from spec.
inline double compare_restriction(const ChainSpec& spec, const std::vector<double>& t_grid,
                                  double tol = 1e-10,
                                  const std::optional<Liouvillian>& restricted = std::nullopt) {
  check_size(spec);
  check_time_grid(t_grid);
  const FullSpaceResult full = full_space_evolve(spec, t_grid, tol);

  const Liouvillian gen = restricted ? *restricted : build_liouvillian(spec, true);
  EvolveOptions eo;
  eo.tol = tol;
  eo.record_steps = false;
  for (double t : t_grid)
    if (t > 0.0) eo.output_times.push_back(t);
  const Trajectory traj =
      evolve(gen, initial_state(spec, Representation::ChainWithSink), t_grid.back(), eo);

  double worst = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    // Trajectory row for t_grid[i]: row 0 is t = 0, then output_times in order.
    const std::size_t row = t_grid.front() == 0.0 ? i : i + 1;
    const DensityMatrix& rho = traj.states.at(row);
    for (int k = 0; k <= spec.n_sites; ++k)
      worst = std::max(worst, std::abs(full.populations(static_cast<Eigen::Index>(i), k) -
                                       rho(k, k).real()));
  }
  return worst;
}

/// Evenly spaced grid 0, dt, ..., t_final.
inline std::vector<double> uniform_time_grid(double t_final, int intervals) {
  std::vector<double> g;
  for (int i = 0; i <= intervals; ++i) g.push_back(t_final * i / intervals);
  return g;
}

}  // namespace eet::oracle
