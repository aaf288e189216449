#pragma once

#include <functional>
#include <vector>

#include "badgeforge/errors.hpp"

namespace badgeforge::numerics {

using Fn = std::function<double(double)>;

struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_iter = 200;

  void validate() const;
};

// Largest n for which binomial_expect sums exactly. Beyond this, callers are
// expected to switch to the large-market limit.
inline constexpr long kBinomialSummationCap = 100000;

// Adaptive composite Simpson on [a, b] with open endpoints: the interval
// endpoints themselves are never evaluated, so integrands with removable
// endpoint singularities (0/0 limits) are handled. Estimated error is kept
// below max(abs_tol, rel_tol * |result|).
double integrate(const Fn& f, double a, double b, const Tolerance& tol = {});

// Bracketed root of a continuous f with f(lo) * f(hi) <= 0. Bisection with
// secant acceleration; terminates when the bracket width drops below
// abs_tol + rel_tol * |root|. Throws NoBracket when the signs agree.
double find_root(const Fn& f, double lo, double hi, const Tolerance& tol = {});

// Scans grid+1 equispaced points for sign changes and refines each bracket
// with find_root. Returns ascending roots; an empty result is not an error.
std::vector<double> find_all_roots(const Fn& f, double lo, double hi, int grid,
                                   const Tolerance& tol = {});

// E[g(T / (n-1))] for T ~ Binomial(n-1, q), i.e. the degree-(n-1) Bernstein
// transform of g evaluated at q. The sum starts at the binomial mode and walks
// the term recurrence outward in both directions, so no term ever overflows or
// underflows for n up to kBinomialSummationCap.
double binomial_expect(const Fn& g, long n, double q);

}  // namespace badgeforge::numerics
