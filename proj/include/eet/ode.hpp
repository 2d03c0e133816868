// ode.hpp: adaptive Dormand–Prince 5(4) integrator with 4th-order dense output
//
// Works on any Eigen dense column vector (real or complex). The local error
// estimate of each accepted step satisfies
//   max_i |err_i| / (atol + rtol * max(|y_i|, |y_new_i|)) <= 1.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "eet/error.hpp"

namespace eet::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// One accepted step with its continuous extension.
template <class State>
class DenseStep {
 public:
  double t_old = 0.0;
  double t_new = 0.0;
  const State* y_old = nullptr;
  const State* y_new = nullptr;

  /// Interpolated state at t in [t_old, t_new].
  State operator()(double t) const {
    const double h = t_new - t_old;
    const double theta = h == 0.0 ? 1.0 : (t - t_old) / h;
    const double theta1 = 1.0 - theta;
    return (*y_old) + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }

  State r2, r3, r4, r5;
};

template <class State>
struct Result {
  double t = 0.0;
  State y;
  Stats stats;
  bool stopped_by_observer = false;
};

namespace detail {

// Butcher tableau, Hairer & Wanner's DOPRI5.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <class State>
double scaled_max(const State& err, const State& y0, const State& y1, const Options& o) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return worst;
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to t_end.
///
/// `rhs(t, y, dy)` writes the derivative into dy. `observer(step)` is called
/// after every accepted step with a DenseStep; returning false stops the
/// integration at step.t_new.
template <class State, class Rhs, class Observer>
Result<State> integrate(Rhs&& rhs, double t0, State y0, double t_end, const Options& opt,
                        Observer&& observer) {
  using namespace detail;
  Result<State> res;
  const Eigen::Index n = y0.size();
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);

  double t = t0;
  State y = std::move(y0);
  rhs(t, y, k1);
  res.stats.rhs_evaluations = 1;

  const double span = t_end - t0;
  if (span <= 0.0) throw PreconditionError("integration interval must be positive");

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting step heuristic.
    State zero = State::Zero(n);
    const double dnf = scaled_max(k1, y, zero, opt);
    const double dny = scaled_max(y, y, zero, opt);
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h0 = std::min(h0, span);
    ytmp = y + h0 * k1;
    rhs(t + h0, ytmp, k2);
    ++res.stats.rhs_evaluations;
    const double der2 = scaled_max(State(k2 - k1), y, zero, opt) / h0;
    const double der = std::max(dnf, der2);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.max_step, span});

  bool last_rejected = false;
  DenseStep<State> step;
  while (t < t_end) {
    if (res.stats.accepted + res.stats.rejected >= opt.max_steps)
      throw IntegrationFailure("maximum number of steps exceeded", t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      throw IntegrationFailure("step size underflow", t);
    const bool final_step = t + h >= t_end;
    if (final_step) h = t_end - t;

    ytmp = y + h * a21 * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, y1, k7);
    res.stats.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double e = scaled_max(err, y, y1, opt);
    if (!std::isfinite(e)) {
      ++res.stats.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    const double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
    if (e > 1.0) {
      ++res.stats.rejected;
      h *= std::min(1.0, fac);
      last_rejected = true;
      continue;
    }

    ++res.stats.accepted;
    const double t_new = final_step ? t_end : t + h;
    step.t_old = t;
    step.t_new = t_new;
    step.y_old = &y;
    step.y_new = &y1;
    step.r2 = y1 - y;
    step.r3 = h * k1 - step.r2;
    step.r4 = step.r2 - h * k7 - step.r3;
    step.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const bool keep_going = observer(static_cast<const DenseStep<State>&>(step));

    t = t_new;
    y.swap(y1);
    k1.swap(k7);
    if (!keep_going) {
      res.stopped_by_observer = true;
      break;
    }
    h = std::min(h * (last_rejected ? std::min(1.0, fac) : fac), opt.max_step);
    last_rejected = false;
  }
  res.t = t;
  res.y = std::move(y);
  return res;
}

}  // namespace eet::ode
