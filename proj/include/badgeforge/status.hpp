#pragma once

#include <functional>
#include <memory>
#include <string>

#include "badgeforge/errors.hpp"

namespace badgeforge::status {

enum class Shape { concave, linear, convex, unknown };

const char* shape_name(Shape s);

// Status value S(t) of beating a 1-t fraction of the population; S is
// non-increasing on [0,1] with S(1) = 0.
class StatusFunction {
 public:
  // S(t) = 1 - t.
  static StatusFunction linear();
  // S(t) = (1-t)^alpha, alpha in (0,1].
  static StatusFunction concave_power(double alpha);
  // S(t) = n_ref / ((n_ref - 1) t + 1) - 1: status inversely proportional to
  // the head count of weakly-better players. S(0) = n_ref - 1.
  static StatusFunction convex_reciprocal(long n_ref);
  // Custom status with a declared shape class; pass Shape::unknown to run the
  // numeric convexity scan instead.
  static StatusFunction custom(std::function<double(double)> s, Shape declared);

  double value(double t) const;  // DomainError outside [0,1]
  Shape shape() const;
  double top() const;  // S(0)
  const std::string& name() const;
  double alpha() const;  // 0 unless concave_power
  long n_ref() const;    // 0 unless convex_reciprocal

 private:
  struct Impl;
  explicit StatusFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Classifies a status function by the sign pattern of second differences on a
// uniform grid (1e-10 slack).
Shape scan_shape(const std::function<double(double)>& s, int grid = 400);

// Population size: a finite n >= 2 or the large-market limit, in which the
// interim transform is replaced by the status function itself.
class MarketSize {
 public:
  static MarketSize finite(long n);
  static MarketSize large();
  bool is_large() const { return large_; }
  long n() const { return n_; }

 private:
  MarketSize(bool large, long n) : large_(large), n_(n) {}
  bool large_ = false;
  long n_ = 0;
};

// Interim status S_n(q): expected status of a fully ranked player at quantile
// q, the degree-(n-1) Bernstein transform of S. Strictly decreasing whenever
// S is, shares S's convexity class, S_n(0) = S(0) and S_n(1) = 0.
class InterimStatus {
 public:
  InterimStatus(StatusFunction s, MarketSize m);
  double value(double q) const;
  // q with S_n(q) = target; OutOfRange unless target in [0, S(0)].
  double inverse(double target) const;
  const StatusFunction& status() const { return status_; }
  const MarketSize& market() const { return market_; }

 private:
  StatusFunction status_;
  MarketSize market_;
};

enum class TieSide { earned, not_earned };

// Tie-generalized status 1 - beta*t_e - t_g, where t_e is the fraction of
// opponents sharing the class and t_g the fraction strictly above. beta is
// the probability of losing against an equal opponent: beta = 1 recovers the
// base model, 1/2 the random-winner model, 0 the everyone-wins model.
struct BetaStatus {
  double beta = 1.0;
  double value(double t_e, double t_g) const { return 1.0 - beta * t_e - t_g; }
};

// Large-market interim status of a single-badge mechanism at quantile
// threshold kappa, for the earning and non-earning side of the boundary.
double beta_interim_single(const BetaStatus& b, double kappa, TieSide side);

}  // namespace badgeforge::status
