#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "badgeforge/errors.hpp"

namespace badgeforge::abilities {

enum class DistKind { uniform01, power, long_tail, empirical_quantile, custom };

// An ability distribution expressed in quantile space. v(q) is the ability of
// the player whose quantile (probability of being beaten by a random draw) is
// q, so v is non-increasing with v(1) = 0. Immutable, cheap to copy.
class AbilityDistribution {
 public:
  // v(q) = 1 - q.
  static AbilityDistribution uniform01();
  // F(a) = a^alpha on [0,1], i.e. v(q) = (1-q)^(1/alpha). Regular iff alpha >= 1.
  static AbilityDistribution power(double alpha);
  // F(a) = (H+1)/H * a/(a+1) on [0,H], i.e. v(q) = (1-q)/(1/H + q).
  static AbilityDistribution long_tail(double h);
  // Piecewise-linear interpolation of the order statistics in quantile space.
  // Negative samples are clamped to zero; at least two samples required.
  static AbilityDistribution empirical_quantile(std::vector<double> samples);
  // Arbitrary non-increasing value curve. Derivatives fall back to finite
  // differences; set trusted_regular only when regularity is known a priori.
  static AbilityDistribution custom(std::function<double(double)> v,
                                    std::string name = "custom",
                                    bool trusted_regular = false);

  DistKind kind() const;
  const std::string& name() const;
  double v_bar() const;  // v(0)
  bool analytic_derivative() const;
  bool trusted_regular() const;

  double value(double q) const;             // v(q)
  double revenue(double q) const;           // R(q) = q * v(q)
  double virtual_value(double q) const;     // R'(q)
  double value_derivative(double q) const;  // v'(q)
  double cdf(double ability) const;         // F(a)

 private:
  struct Impl;
  explicit AbilityDistribution(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

struct RegularityReport {
  bool regular = false;
  double worst_violation = 0.0;  // largest increase of R' seen on the grid
};

// R' sampled on a grid; regular iff non-increasing within 1e-8 slack.
RegularityReport check_regularity(const AbilityDistribution& dist, int grid = 1000);

// Zero of R' on [0,1]. Trusted built-ins skip the diagnostic; everything else
// must pass check_regularity first or NotRegular is thrown.
double monopoly_quantile(const AbilityDistribution& dist);

// Revenue curve of a distribution with the monopoly quantile cached.
class RevenueCurve {
 public:
  explicit RevenueCurve(AbilityDistribution dist);
  double value(double q) const;
  double derivative(double q) const;
  double monopoly_quantile() const { return kappa_star_; }
  const AbilityDistribution& distribution() const { return dist_; }

 private:
  AbilityDistribution dist_;
  double kappa_star_;
};

struct PopulationMix {
  struct Component {
    double weight;  // in (0,1]
    AbilityDistribution dist;
  };
  std::vector<Component> components;  // weights must sum to 1 within 1e-12
};

// Distribution whose CDF is the weight-mixture of the component CDFs. The
// value curve is obtained by root-finding on the mixture CDF; large-market
// mechanisms then treat the aggregate exactly as a symmetric population.
AbilityDistribution aggregate(const PopulationMix& mix);

// One ability per line, ascending not required. Throws ConfigError.
std::vector<double> load_samples(const std::string& path);

}  // namespace badgeforge::abilities
