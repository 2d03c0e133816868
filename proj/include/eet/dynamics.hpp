// dynamics.hpp: time evolution of the master equation and the transfer
// efficiency eta = Lambda * int_0^inf rho_NN(t) dt.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eet/error.hpp"
#include "eet/model.hpp"
#include "eet/ode.hpp"

namespace eet {

/// Snapshots of an evolved density matrix.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  Eigen::MatrixXd populations;     // rows: snapshots, cols: chain sites
  std::vector<double> sink_series;  // empty for the chain-only representation
  ode::Stats stats;
};

struct EvolveOptions {
  double tol = 1e-10;
  /// Extra snapshot times in (0, t_final], filled from the dense output.
  std::vector<double> output_times;
  /// Also keep a snapshot at every accepted integrator step.
  bool record_steps = true;
};

namespace detail {

inline void check_tolerance(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4))
    throw PreconditionError("tolerance must lie in [1e-12, 1e-4], got " + std::to_string(tol));
}

inline double chain_trace(const CVector& vec_rho, Eigen::Index dim, int n_chain) {
  double tr = 0.0;
  for (int k = 0; k < n_chain; ++k) tr += vec_rho[k + k * dim].real();
  return tr;
}

}  // namespace detail

/// Integrates d vec(rho)/dt = G vec(rho) from rho0 up to t_final.
inline Trajectory evolve(const Liouvillian& generator, const DensityMatrix& rho0, double t_final,
                         const EvolveOptions& opts = {}) {
  detail::check_tolerance(opts.tol);
  if (rho0.representation() != generator.representation() || rho0.dim() != generator.dim())
    throw PreconditionError("initial state and generator use different representations");
  if (!(t_final > 0.0)) throw PreconditionError("t_final must be positive");

  std::vector<double> grid = opts.output_times;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double t : grid)
    if (!(t > 0.0 && t <= t_final))
      throw PreconditionError("requested output time outside (0, t_final]");

  const Eigen::Index dim = generator.dim();
  const bool with_sink = generator.representation() == Representation::ChainWithSink;
  const int n_chain = static_cast<int>(with_sink ? dim - 1 : dim);
  const SparseCMatrix g = generator.to_sparse();

  Trajectory traj;
  std::vector<CVector> vecs;
  const auto push = [&](double t, CVector v) {
    if (!traj.times.empty() && t <= traj.times.back()) return;
    traj.times.push_back(t);
    vecs.push_back(std::move(v));
  };
  push(0.0, vectorize(rho0.matrix()));

  std::size_t next = 0;
  const auto rhs = [&](double, const CVector& y, CVector& dy) { dy.noalias() = g * y; };
  const auto observer = [&](const ode::DenseStep<CVector>& step) {
    while (next < grid.size() && grid[next] <= step.t_new) {
      if (grid[next] == step.t_new)
        push(grid[next], *step.y_new);
      else
        push(grid[next], step(grid[next]));
      ++next;
    }
    if (opts.record_steps) push(step.t_new, *step.y_new);
    return true;
  };
  ode::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  auto result = ode::integrate(rhs, 0.0, vectorize(rho0.matrix()), t_final, o, observer);
  push(result.t, result.y);
  traj.stats = result.stats;

  traj.populations.resize(static_cast<Eigen::Index>(vecs.size()), n_chain);
  traj.states.reserve(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    // Integrator error leaves a small anti-Hermitian part; keep the Hermitian one.
    CMatrix raw = unvectorize(vecs[i], dim);
    CMatrix rho = 0.5 * (raw + raw.adjoint());
    for (int k = 0; k < n_chain; ++k)
      traj.populations(static_cast<Eigen::Index>(i), k) = rho(k, k).real();
    if (with_sink) traj.sink_series.push_back(rho(n_chain, n_chain).real());
    traj.states.emplace_back(std::move(rho), generator.representation());
  }
  return traj;
}

/// Condition numbers above this make the linear-solve efficiency unreliable.
inline constexpr double kMaxConditionEstimate = 1e14;

/// Efficiency from the resolvent at s = 0: solve G vec(X) = -vec(rho0) on the
/// chain-only space, where X = int_0^inf rho dt, then eta = Lambda * X_NN.
inline double efficiency_linear_solve(const ChainSpec& spec) {
  validate(spec);
  if (!(spec.gamma_diss > 0.0))
    throw PreconditionError("gamma_diss must be positive for the linear-solve efficiency");
  const Liouvillian gen = build_liouvillian(spec, false);
  const CVector rhs = -vectorize(initial_state(spec, Representation::ChainOnly).matrix());
  const Eigen::Index n = gen.dim();
  const Eigen::Index nn = (spec.n_sites - 1) * (n + 1);

  CVector x;
  if (gen.is_dense()) {
    const CMatrix g = gen.to_dense();
    Eigen::PartialPivLU<CMatrix> lu(g);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > kMaxConditionEstimate)
      throw NumericalFailure("chain-only generator is singular or ill-conditioned (condition ~ " +
                             std::to_string(rcond > 0.0 ? 1.0 / rcond : HUGE_VAL) +
                             "); use efficiency_time_integrated instead");
    x = lu.solve(rhs);
  } else {
    const SparseCMatrix g = gen.to_sparse();
    Eigen::SparseLU<SparseCMatrix> lu;
    lu.compute(g);
    if (lu.info() != Eigen::Success)
      throw NumericalFailure("sparse factorization of the generator failed; use "
                             "efficiency_time_integrated instead");
    x = lu.solve(rhs);
    const double residual = (g * x - rhs).norm();
    if (!(residual <= 1e-8))
      throw NumericalFailure("sparse solve residual too large; use efficiency_time_integrated");
  }
  return spec.lambda_sink * x[nn].real();
}

enum class StopReason { ChainEmptied, Horizon };

struct TimeIntegratedEfficiency {
  double eta = 0.0;              // Lambda * int rho_NN dt, accumulated along the run
  double sink_population = 0.0;  // rho_{N+1,N+1} at the stopping time
  double t_stop = 0.0;
  double residual_trace = 0.0;
  StopReason reason = StopReason::ChainEmptied;
  ode::Stats stats;
};

struct TimeIntegrationOptions {
  double tol = 1e-10;
  /// Integration horizon in units of 1/gamma_diss.
  double horizon_factor = 50.0;
};

/// Efficiency by propagating the chain+sink state until the chain trace drops
/// below tol. The integral of Lambda * rho_NN is carried as an extra ODE
/// component, so it shares the integrator's error control.
inline TimeIntegratedEfficiency efficiency_time_integrated(const ChainSpec& spec,
                                                           const TimeIntegrationOptions& opts = {}) {
  validate(spec);
  detail::check_tolerance(opts.tol);
  if (!(spec.gamma_diss > 0.0))
    throw PreconditionError("gamma_diss must be positive for the time-integrated efficiency");

  const Liouvillian gen = build_liouvillian(spec, true);
  const SparseCMatrix g = gen.to_sparse();
  const Eigen::Index dim = gen.dim();
  const Eigen::Index m = dim * dim;
  const Eigen::Index nn = (spec.n_sites - 1) * (dim + 1);
  const Eigen::Index sink = spec.n_sites * (dim + 1);
  const double lambda = spec.lambda_sink;

  CVector y0 = CVector::Zero(m + 1);
  y0.head(m) = vectorize(initial_state(spec, Representation::ChainWithSink).matrix());

  const auto rhs = [&](double, const CVector& y, CVector& dy) {
    dy.head(m).noalias() = g * y.head(m);
    dy[m] = lambda * y[nn].real();
  };
  double residual = 1.0;
  const auto observer = [&](const ode::DenseStep<CVector>& step) {
    residual = detail::chain_trace(step.y_new->head(m), dim, spec.n_sites);
    return residual >= opts.tol;
  };
  ode::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  const double horizon = opts.horizon_factor / spec.gamma_diss;
  const auto result = ode::integrate(rhs, 0.0, std::move(y0), horizon, o, observer);

  TimeIntegratedEfficiency out;
  out.eta = result.y[m].real();
  out.sink_population = result.y[sink].real();
  out.t_stop = result.t;
  out.residual_trace = residual;
  out.stats = result.stats;
  out.reason = result.stopped_by_observer ? StopReason::ChainEmptied : StopReason::Horizon;
  if (out.reason == StopReason::Horizon && residual >= opts.tol)
    throw PartialResultError("horizon " + std::to_string(horizon) +
                                 " reached with chain trace " + std::to_string(residual) +
                                 " still above tolerance",
                             out.eta);
  return out;
}

}  // namespace eet
