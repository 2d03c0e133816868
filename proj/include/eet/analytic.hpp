// analytic.hpp: closed-form two-site results
//
// For N = 2 the efficiency depends on the transport rates only through the
// effective hopping
//   f = 4 v^2 / Delta + gamma_h,   Delta = D + 4 delta^2 / D,
//   D = 2 Gamma + Lambda + 2 (gamma + gamma_h),
// and eta = eta_c [1 - Gamma (Gamma + Lambda) / (Gamma (Gamma + Lambda) + f (2 Gamma + Lambda))]
// with eta_c = Lambda / (2 Gamma + Lambda). Every function here is templated
// on the floating-point type so tests can cross-check in extended precision.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "eet/error.hpp"
#include "eet/numeric.hpp"

namespace eet {

template <std::floating_point Real>
struct BasicTwoSiteParams {
  Real v = 1;
  Real delta = 0;  // omega_1 - omega_2
  Real gamma_diss = Real(0.02);
  Real gamma_deph = 0;
  Real gamma_hop = 0;
  Real lambda_sink = Real(0.2);
};
using TwoSiteParams = BasicTwoSiteParams<double>;

template <std::floating_point Real>
void validate(const BasicTwoSiteParams<Real>& p) {
  const auto rate = [](const char* name, Real x) {
    if (!std::isfinite(x)) throw ValidationError(name, "must be finite");
    if (x < 0) throw ValidationError(name, "must be nonnegative");
  };
  rate("v", p.v);
  rate("gamma_diss", p.gamma_diss);
  rate("gamma_deph", p.gamma_deph);
  rate("gamma_hop", p.gamma_hop);
  rate("lambda_sink", p.lambda_sink);
  if (!std::isfinite(p.delta)) throw ValidationError("delta", "must be finite");
}

/// D: sum of all incoherent rates.
template <std::floating_point Real>
Real incoherent_sum(const BasicTwoSiteParams<Real>& p) {
  return 2 * p.gamma_diss + p.lambda_sink + 2 * (p.gamma_deph + p.gamma_hop);
}

/// Delta = D + 4 delta^2 / D.
template <std::floating_point Real>
Real dressed_width(const BasicTwoSiteParams<Real>& p) {
  const Real d = incoherent_sum(p);
  return d + 4 * p.delta * p.delta / d;
}

template <std::floating_point Real>
Real effective_hopping(const BasicTwoSiteParams<Real>& p) {
  validate(p);
  if (!(incoherent_sum(p) > 0))
    throw PreconditionError("effective_hopping: incoherent rate sum must be positive");
  return 4 * p.v * p.v / dressed_width(p) + p.gamma_hop;
}

template <std::floating_point Real>
Real eta_saturated(Real gamma_diss, Real lambda_sink) {
  const Real total = 2 * gamma_diss + lambda_sink;
  if (!(total > 0)) throw PreconditionError("eta_saturated: 2 Gamma + Lambda must be positive");
  return lambda_sink / total;
}

template <std::floating_point Real>
Real eta_two_site(const BasicTwoSiteParams<Real>& p) {
  validate(p);
  const Real g = p.gamma_diss, l = p.lambda_sink;
  if (!(g > 0 || l > 0))
    throw PreconditionError("eta_two_site: undefined efficiency when Gamma = Lambda = 0");
  const Real loss = g * (g + l);
  const Real transport = effective_hopping(p) * (2 * g + l);
  // Gamma = 0 and f = 0: nothing moves and nothing decays.
  if (loss + transport == 0) return 0;
  return eta_saturated(g, l) * (1 - loss / (loss + transport));
}

/// gamma_h minimizing eta at delta = 0, from D = 2 sqrt(2) v. Empty when the
/// minimizer is not strictly interior (gamma_h* <= 0).
template <std::floating_point Real>
std::optional<Real> dip_location_uniform(Real gamma_diss, Real lambda_sink, Real gamma_deph,
                                         Real v = 1) {
  const Real x = (2 * std::sqrt(Real(2)) * v - (2 * gamma_diss + lambda_sink + 2 * gamma_deph)) / 2;
  if (!(x > 0)) return std::nullopt;
  return x;
}

/// Closed-form relative dip depth
///   Gamma (Gamma + Lambda) / (Gamma (Gamma + Lambda) + [2 sqrt 2 v - (2 Gamma + Lambda)] (2 Gamma + Lambda)).
/// Minimizing f at delta = gamma = 0 gives
/// f_min = 2 sqrt 2 v - (2 Gamma + Lambda) / 2 instead, so this does not equal
/// dip_depth_numeric; both are reported by dip_depth().
template <std::floating_point Real>
Real dip_depth_closed_form(Real gamma_diss, Real lambda_sink, Real v = 1) {
  const Real c = 2 * gamma_diss + lambda_sink;
  const Real gap = 2 * std::sqrt(Real(2)) * v - c;
  if (!(gap > 0)) throw NoDipError("no dip: 2 Gamma + Lambda >= 2 sqrt(2) v");
  const Real loss = gamma_diss * (gamma_diss + lambda_sink);
  return loss / (loss + gap * c);
}

/// Upper end of the gamma_h bracket searched for the efficiency minimum.
inline constexpr double kDipSearchMax = 1e3;

template <std::floating_point Real>
struct DipMinimum {
  Real location;       // argmin over gamma_h
  Real eta_min;
  Real eta_saturated;
  Real relative_depth;  // (eta_c - eta_min) / eta_c
};

/// Golden-section minimization of eta_two_site over gamma_h in [0, 1e3].
template <std::floating_point Real>
DipMinimum<Real> dip_depth_numeric(BasicTwoSiteParams<Real> p, Real xtol = Real(1e-12)) {
  const auto eta = [&](Real gh) {
    p.gamma_hop = gh;
    return eta_two_site(p);
  };
  const auto m = numeric::golden_section_minimize(eta, Real(0), Real(kDipSearchMax), xtol);
  const Real sat = eta_saturated(p.gamma_diss, p.lambda_sink);
  return {m.x, m.value, sat, (sat - m.value) / sat};
}

/// Interior minimum of eta(gamma_h) on [0, 1e3], or empty when the curve is
/// monotone there (the minimizer sits on the left end).
template <std::floating_point Real>
std::optional<DipMinimum<Real>> interior_dip(BasicTwoSiteParams<Real> p) {
  const auto m = dip_depth_numeric(p);
  p.gamma_hop = 0;
  const Real at_zero = eta_two_site(p);
  if (!(m.location > Real(1e-9) && m.eta_min < at_zero)) return std::nullopt;
  return m;
}

struct DipDepthReport {
  double closed_form;
  double numeric;
  double numeric_location;
};

/// Closed-form and numerically minimized relative depth at delta = gamma = 0.
inline DipDepthReport dip_depth(double gamma_diss, double lambda_sink, double v = 1) {
  const double closed = dip_depth_closed_form(gamma_diss, lambda_sink, v);
  TwoSiteParams p;
  p.v = v;
  p.gamma_diss = gamma_diss;
  p.lambda_sink = lambda_sink;
  const auto num = dip_depth_numeric(p);
  return {closed, num.relative_depth, num.location};
}

/// gamma_h^c solving 4 v^2 / Delta(gamma_h) = gamma_h. gamma_h * Delta(gamma_h)
/// is strictly increasing from 0, so the root is unique; bisection on
/// [0, 2v] brackets it because Delta > 2 gamma_h.
template <std::floating_point Real>
Real critical_incoherent_hopping(BasicTwoSiteParams<Real> p) {
  validate(p);
  if (!(p.v > 0)) throw PreconditionError("critical_incoherent_hopping: v must be positive");
  const auto balance = [&](Real gh) {
    p.gamma_hop = gh;
    return gh * dressed_width(p) - 4 * p.v * p.v;
  };
  return numeric::bisect_root(balance, Real(0), 2 * p.v, Real(0));
}

enum class Region { B, I, II, III };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::B: return "B";
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
  }
  return "?";
}

/// Number of interior extrema of eta(gamma_h) in each region.
inline int extrema_count(Region r) {
  switch (r) {
    case Region::I: return 2;
    case Region::II: return 1;
    default: return 0;
  }
}

struct RegionLabel {
  Region region = Region::B;
  std::optional<double> d_minus;
  std::optional<double> d_plus;
};

/// Values of D where df/dgamma_h = 0, i.e. (D^2 + 4 delta^2)^2 = 8 v^2 (D^2 - 4 delta^2):
///   D_pm = 2 sqrt(v^2 - delta^2 pm v sqrt(v^2 - 4 delta^2)).
/// Empty when |delta| >= v / 2.
inline std::optional<std::pair<double, double>> stationary_boundaries(double delta, double v = 1) {
  if (!(std::abs(delta) < v / 2)) return std::nullopt;
  const double root = v * std::sqrt(v * v - 4 * delta * delta);
  const double base = v * v - delta * delta;
  return std::pair{2 * std::sqrt(std::max(0.0, base - root)), 2 * std::sqrt(base + root)};
}

/// Region of the (c, delta) plane, with c = 2 Gamma + Lambda + 2 gamma.
/// As gamma_h grows D sweeps [c, inf); f rises below D_-, falls between D_-
/// and D_+, and rises again above D_+. A boundary only counts if f'' is
/// nonzero there (f'' ~ -D (12 delta^2 - D^2)); ties go to the region with
/// fewer extrema.
inline RegionLabel classify_region(double delta, double c, double v = 1) {
  if (!(c > 0)) throw PreconditionError("classify_region: c must be positive");
  if (!(v >= 0)) throw PreconditionError("classify_region: v must be nonnegative");
  const auto bounds = stationary_boundaries(delta, v);
  if (!bounds) return {Region::B, std::nullopt, std::nullopt};
  const auto [dm, dp] = *bounds;
  const double d2 = 12 * delta * delta;
  const bool genuine_max = dm * dm < d2;
  const bool genuine_min = dp * dp > d2;
  Region r = Region::III;
  if (c < dm && genuine_max && genuine_min)
    r = Region::I;
  else if (c < dp && genuine_min)
    r = Region::II;
  return {r, dm, dp};
}

}  // namespace eet
