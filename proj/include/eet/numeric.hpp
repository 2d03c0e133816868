// numeric.hpp: derivative-free bracketing: golden-section search and bisection

#pragma once

#include <cmath>
#include <concepts>
#include <utility>

#include "eet/error.hpp"

namespace eet::numeric {

template <std::floating_point Real>
struct Minimum {
  Real x;
  Real value;
};

/// Minimizes a unimodal `f` on [lo, hi] until the bracket is narrower than
/// `xtol` or stops shrinking in floating point.
template <std::floating_point Real, class F>
Minimum<Real> golden_section_minimize(F&& f, Real lo, Real hi, Real xtol = Real(1e-12)) {
  if (!(lo <= hi)) throw PreconditionError("golden_section_minimize: empty bracket");
  const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
  Real a = lo, b = hi;
  Real c = b - inv_phi * (b - a);
  Real d = a + inv_phi * (b - a);
  Real fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      if (!(c > a && c < d)) break;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      if (!(d > c && d < b)) break;
      fd = f(d);
    }
  }
  return fc <= fd ? Minimum<Real>{c, fc} : Minimum<Real>{d, fd};
}

/// Root of `f` on [lo, hi] where f(lo) and f(hi) differ in sign. Bisects
/// until the bracket is below `xtol` or cannot be split further.
template <std::floating_point Real, class F>
Real bisect_root(F&& f, Real lo, Real hi, Real xtol = Real(1e-15)) {
  Real flo = f(lo);
  const Real fhi = f(hi);
  if (flo == Real(0)) return lo;
  if (fhi == Real(0)) return hi;
  if ((flo > 0) == (fhi > 0)) throw PreconditionError("bisect_root: root not bracketed");
  while (hi - lo > xtol) {
    const Real mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    const Real fm = f(mid);
    if (fm == Real(0)) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

}  // namespace eet::numeric
