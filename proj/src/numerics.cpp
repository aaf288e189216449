#include "badgeforge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace badgeforge::numerics {

namespace {

bool same_sign(double a, double b) {
  return (a > 0 && b > 0) || (a < 0 && b < 0);
}

// Evaluates f at x, nudging toward the interval center when the value is not
// finite. Keeps the quadrature rule open at singular endpoints.
double eval_open(const Fn& f, double x, double lo, double hi) {
  double v = f(x);
  if (std::isfinite(v)) return v;
  const double width = hi - lo;
  const double center = 0.5 * (lo + hi);
  const double dir = (x < center) ? 1.0 : -1.0;
  for (double shift : {1e-12, 1e-9, 1e-7, 1e-5}) {
    v = f(x + dir * shift * width);
    if (std::isfinite(v)) return v;
  }
  throw DomainError("integrate: integrand not finite near x");
}

struct SimpsonState {
  const Fn& f;
  double lo, hi;
  int max_depth;
};

double simpson_rec(const SimpsonState& st, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double eps,
                   int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = eval_open(st.f, lm, st.lo, st.hi);
  const double frm = eval_open(st.f, rm, st.lo, st.hi);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps || (b - a) < 1e-14 * (st.hi - st.lo)) {
    return left + right + delta / 15.0;
  }
  if (depth >= st.max_depth) {
    throw NonConvergence("integrate: subdivision limit exhausted");
  }
  return simpson_rec(st, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth + 1) +
         simpson_rec(st, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth + 1);
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0) || max_iter < 1) {
    throw DomainError("Tolerance: abs_tol > 0, rel_tol > 0, max_iter >= 1 required");
  }
}

double integrate(const Fn& f, double a, double b, const Tolerance& tol) {
  tol.validate();
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return 0.0;

  // Endpoints are sampled slightly inside the interval. Integrands that are
  // numerically noisy right at an endpoint contaminate only these two nodes,
  // whose weight shrinks away under the adaptive refinement.
  const double width = b - a;
  const double a_in = a + 1e-12 * width;
  const double b_in = b - 1e-12 * width;
  SimpsonState st{f, a, b, tol.max_iter};
  const double fa = eval_open(f, a_in, a, b);
  const double fb = eval_open(f, b_in, a, b);

  // Coarse composite pass to seed the global error budget.
  int segments = 16;
  double rough = 0.0;
  double prev_x = a_in;
  double prev_f = fa;
  for (int i = 1; i <= segments; ++i) {
    double x = (i == segments) ? b_in : a + width * i / segments;
    double fx = (i == segments) ? fb : eval_open(f, x, a, b);
    double mid = 0.5 * (prev_x + x);
    rough += (x - prev_x) / 6.0 * (prev_f + 4.0 * eval_open(f, mid, a, b) + fx);
    prev_x = x;
    prev_f = fx;
  }
  const double eps = std::max(tol.abs_tol, tol.rel_tol * std::abs(rough));

  double total = 0.0;
  prev_x = a_in;
  prev_f = fa;
  for (int i = 1; i <= segments; ++i) {
    double x = (i == segments) ? b_in : a + width * i / segments;
    double fx = (i == segments) ? fb : eval_open(f, x, a, b);
    double mid = 0.5 * (prev_x + x);
    double fmid = eval_open(f, mid, a, b);
    double whole = (x - prev_x) / 6.0 * (prev_f + 4.0 * fmid + fx);
    total += simpson_rec(st, prev_x, prev_f, x, fx, mid, fmid, whole,
                         eps / segments, 0);
    prev_x = x;
    prev_f = fx;
  }
  return total;
}

double find_root(const Fn& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (!(lo <= hi)) throw DomainError("find_root: requires lo <= hi");
  double fl = f(lo);
  double fh = f(hi);
  if (fl == 0.0) return lo;
  if (fh == 0.0) return hi;
  if (same_sign(fl, fh)) throw NoBracket("find_root: f(lo) and f(hi) have the same sign");

  double width_two_ago = hi - lo;
  const int iter_cap = std::max(tol.max_iter, 200);
  for (int it = 0; it < iter_cap; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double width = hi - lo;
    if (width <= tol.abs_tol + tol.rel_tol * std::abs(mid)) return mid;

    double x;
    // Secant candidate, guarded to stay strictly inside the bracket; fall
    // back to bisection when the bracket stops halving.
    const bool force_bisect = (it % 2 == 1) && (width > 0.5 * width_two_ago);
    if (it % 2 == 1) width_two_ago = width;
    if (!force_bisect && std::isfinite(fl) && std::isfinite(fh) && fh != fl) {
      x = hi - fh * (hi - lo) / (fh - fl);
      const double margin = 0.01 * width;
      if (!(x > lo + margin && x < hi - margin)) x = mid;
    } else {
      x = mid;
    }
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (same_sign(fx, fl)) {
      lo = x;
      fl = fx;
    } else {
      hi = x;
      fh = fx;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> find_all_roots(const Fn& f, double lo, double hi, int grid,
                                   const Tolerance& tol) {
  tol.validate();
  if (grid < 2) throw DomainError("find_all_roots: grid >= 2 required");
  if (!(lo <= hi)) throw DomainError("find_all_roots: requires lo <= hi");

  std::vector<double> roots;
  const double h = (hi - lo) / grid;
  double prev_x = lo;
  double prev_f = f(lo);
  if (prev_f == 0.0) roots.push_back(lo);
  for (int i = 1; i <= grid; ++i) {
    const double x = (i == grid) ? hi : lo + h * i;
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (prev_f != 0.0 && !same_sign(prev_f, fx)) {
      roots.push_back(find_root(f, prev_x, x, tol));
    }
    prev_x = x;
    prev_f = fx;
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || r - out.back() > 2.0 * (tol.abs_tol + tol.rel_tol * std::abs(r))) {
      out.push_back(r);
    }
  }
  return out;
}

double binomial_expect(const Fn& g, long n, double q) {
  if (n < 2) throw DomainError("binomial_expect: n >= 2 required");
  if (n > kBinomialSummationCap) {
    throw Overflow("binomial_expect: n exceeds the exact summation cap");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("binomial_expect: q in [0,1] required");
  const long trials = n - 1;
  if (q <= 0.0) return g(0.0);
  if (q >= 1.0) return g(1.0);

  long mode = static_cast<long>(std::floor((trials + 1) * q));
  mode = std::clamp(mode, 0L, trials);
  const double log_w_mode = std::lgamma(trials + 1.0) - std::lgamma(mode + 1.0) -
                            std::lgamma(trials - mode + 1.0) +
                            mode * std::log(q) + (trials - mode) * std::log1p(-q);
  const double w_mode = std::exp(log_w_mode);
  const double cutoff = w_mode * 1e-18;
  const double up_ratio = q / (1.0 - q);

  double total = w_mode * g(static_cast<double>(mode) / trials);
  double w = w_mode;
  for (long v = mode; v < trials;) {
    w *= static_cast<double>(trials - v) / static_cast<double>(v + 1) * up_ratio;
    ++v;
    if (!(w >= cutoff)) break;
    total += w * g(static_cast<double>(v) / trials);
  }
  w = w_mode;
  for (long v = mode; v > 0;) {
    w *= static_cast<double>(v) / static_cast<double>(trials - v + 1) / up_ratio;
    --v;
    if (!(w >= cutoff)) break;
    total += w * g(static_cast<double>(v) / trials);
  }
  return total;
}

}  // namespace badgeforge::numerics
