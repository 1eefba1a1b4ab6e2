#pragma once

// One-dimensional bracketing solvers shared by the traffic and allocator
// modules. Both are deliberately plain: the objectives they serve are
// monotone or unimodal by construction, and determinism matters more than
// iteration count.

#include <cmath>
#include <concepts>
#include <limits>
#include <string>

#include "lfmimo/error.hpp"

namespace lfmimo::numeric {

inline constexpr int kDefaultMaxIterations = 200;

struct Bracket {
  double lo;
  double hi;
  int iterations;
};

/// Shrinks [lo, hi] around the switch point of a monotone predicate with
/// `pred(lo) == false` and `pred(hi) == true`. Stops once
/// hi - lo <= rel_tol * |hi| (or abs_tol, whichever is larger).
/// The returned `hi` always satisfies the predicate.
template <std::predicate<double> Pred>
Bracket bisect(Pred&& pred, double lo, double hi, double rel_tol, double abs_tol = 0.0,
               int max_iterations = kDefaultMaxIterations) {
  int it = 0;
  while (hi - lo > std::max(rel_tol * std::abs(hi), abs_tol)) {
    if (++it > max_iterations) {
      throw ConvergenceError("bisection did not converge after " +
                             std::to_string(max_iterations) + " iterations");
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at machine resolution
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi, it};
}

/// Same as `bisect` but halves the interval geometrically, for positive
/// quantities spanning many decades (transmit power).
template <std::predicate<double> Pred>
Bracket bisect_log(Pred&& pred, double lo, double hi, double rel_tol,
                   int max_iterations = kDefaultMaxIterations) {
  int it = 0;
  while (hi - lo > rel_tol * hi) {
    if (++it > max_iterations) {
      throw ConvergenceError("log-bisection did not converge after " +
                             std::to_string(max_iterations) + " iterations");
    }
    double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi, it};
}

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for the minimum of a unimodal `f` on [a, b].
/// `f` may return +inf on part of the interval (infeasible region); since
/// infeasibility in this library only ever sits below the feasible range,
/// ties between two infinite probes move the bracket right.
template <std::invocable<double> F>
Minimum golden_section(F&& f, double a, double b, double tol,
                       int max_iterations = kDefaultMaxIterations) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; b - a > tol; ++it) {
    if (it >= max_iterations) {
      throw ConvergenceError("golden-section search did not converge");
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? Minimum{c, fc} : Minimum{d, fd};
}

}  // namespace lfmimo::numeric
