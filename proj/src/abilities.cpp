#include "badgeforge/abilities.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "badgeforge/numerics.hpp"

namespace badgeforge::abilities {

namespace {

void require_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0,1]");
}

constexpr double kFdStep = 1e-6;

}  // namespace

struct AbilityDistribution::Impl {
  DistKind kind = DistKind::custom;
  std::string name = "custom";
  double alpha = 0.0;  // power
  double h = 0.0;      // long_tail
  std::vector<double> grid_values;  // empirical, descending
  std::function<double(double)> value_fn;  // custom
  double v_bar = 0.0;
  bool analytic = false;
  bool trusted_regular = false;

  double value(double q) const {
    switch (kind) {
      case DistKind::uniform01:
        return 1.0 - q;
      case DistKind::power:
        return std::pow(1.0 - q, 1.0 / alpha);
      case DistKind::long_tail:
        return (1.0 - q) / (1.0 / h + q);
      case DistKind::empirical_quantile: {
        const std::size_t m = grid_values.size();
        const double pos = q * (m - 1);
        const std::size_t i = std::min(static_cast<std::size_t>(pos), m - 2);
        const double frac = pos - i;
        return grid_values[i] * (1.0 - frac) + grid_values[i + 1] * frac;
      }
      case DistKind::custom:
        return value_fn(q);
    }
    return 0.0;
  }

  double derivative(double q) const {
    switch (kind) {
      case DistKind::uniform01:
        return -1.0;
      case DistKind::power:
        return -(1.0 / alpha) * std::pow(1.0 - q, 1.0 / alpha - 1.0);
      case DistKind::long_tail: {
        const double d = 1.0 / h + q;
        return -(1.0 / h + 1.0) / (d * d);
      }
      default: {
        // Central difference, one-sided at the endpoints.
        if (q < kFdStep) return (value(q + kFdStep) - value(q)) / kFdStep;
        if (q > 1.0 - kFdStep) return (value(q) - value(q - kFdStep)) / kFdStep;
        return (value(q + kFdStep) - value(q - kFdStep)) / (2.0 * kFdStep);
      }
    }
  }
};

AbilityDistribution::AbilityDistribution(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

AbilityDistribution AbilityDistribution::uniform01() {
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::uniform01;
  impl->name = "uniform01";
  impl->v_bar = 1.0;
  impl->analytic = true;
  impl->trusted_regular = true;
  return AbilityDistribution(impl);
}

AbilityDistribution AbilityDistribution::power(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("power: alpha > 0 required");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::power;
  impl->name = "power(" + std::to_string(alpha) + ")";
  impl->alpha = alpha;
  impl->v_bar = 1.0;
  impl->analytic = true;
  impl->trusted_regular = alpha >= 1.0;
  return AbilityDistribution(impl);
}

AbilityDistribution AbilityDistribution::long_tail(double h) {
  if (!(h > 0.0)) throw DomainError("long_tail: H > 0 required");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::long_tail;
  impl->name = "long_tail(" + std::to_string(h) + ")";
  impl->h = h;
  impl->v_bar = h;
  impl->analytic = true;
  impl->trusted_regular = true;
  return AbilityDistribution(impl);
}

AbilityDistribution AbilityDistribution::empirical_quantile(std::vector<double> samples) {
  if (samples.size() < 2) throw DomainError("empirical_quantile: at least two samples required");
  for (double& s : samples) s = std::max(s, 0.0);
  std::sort(samples.begin(), samples.end(), std::greater<>());
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::empirical_quantile;
  impl->name = "empirical(" + std::to_string(samples.size()) + ")";
  impl->grid_values = std::move(samples);
  impl->v_bar = impl->grid_values.front();
  impl->analytic = false;
  return AbilityDistribution(impl);
}

AbilityDistribution AbilityDistribution::custom(std::function<double(double)> v,
                                                std::string name,
                                                bool trusted_regular) {
  if (!v) throw DomainError("custom: value function required");
  auto impl = std::make_shared<Impl>();
  impl->kind = DistKind::custom;
  impl->name = std::move(name);
  impl->value_fn = std::move(v);
  impl->v_bar = impl->value_fn(0.0);
  impl->analytic = false;
  impl->trusted_regular = trusted_regular;
  return AbilityDistribution(impl);
}

DistKind AbilityDistribution::kind() const { return impl_->kind; }
const std::string& AbilityDistribution::name() const { return impl_->name; }
double AbilityDistribution::v_bar() const { return impl_->v_bar; }
bool AbilityDistribution::analytic_derivative() const { return impl_->analytic; }
bool AbilityDistribution::trusted_regular() const { return impl_->trusted_regular; }

double AbilityDistribution::value(double q) const {
  require_quantile(q);
  return impl_->value(q);
}

double AbilityDistribution::revenue(double q) const {
  require_quantile(q);
  return q * impl_->value(q);
}

double AbilityDistribution::value_derivative(double q) const {
  require_quantile(q);
  return impl_->derivative(q);
}

double AbilityDistribution::virtual_value(double q) const {
  require_quantile(q);
  // R'(q) = v(q) + q v'(q)
  return impl_->value(q) + q * impl_->derivative(q);
}

double AbilityDistribution::cdf(double ability) const {
  const double vb = impl_->v_bar;
  if (ability <= 0.0) return 0.0;
  if (ability >= vb) return 1.0;
  switch (impl_->kind) {
    case DistKind::uniform01:
      return ability;
    case DistKind::power:
      return std::pow(ability, impl_->alpha);
    case DistKind::long_tail:
      return (impl_->h + 1.0) / impl_->h * ability / (ability + 1.0);
    default: {
      // Invert the non-increasing value curve: F(a) = 1 - v^{-1}(a).
      numerics::Tolerance tol;
      tol.abs_tol = 1e-13;
      const double q = numerics::find_root(
          [&](double x) { return impl_->value(x) - ability; }, 0.0, 1.0, tol);
      return 1.0 - q;
    }
  }
}

RegularityReport check_regularity(const AbilityDistribution& dist, int grid) {
  if (grid < 10) throw DomainError("check_regularity: grid >= 10 required");
  RegularityReport report;
  double prev = dist.virtual_value(0.0);
  double worst = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double q = static_cast<double>(i) / grid;
    const double cur = dist.virtual_value(q);
    if (std::isfinite(cur) && std::isfinite(prev)) {
      worst = std::max(worst, cur - prev);
    } else if (std::isinf(cur) && cur > 0.0) {
      worst = std::max(worst, 1.0);
    }
    prev = cur;
  }
  report.worst_violation = worst;
  report.regular = worst <= 1e-8;
  return report;
}

double monopoly_quantile(const AbilityDistribution& dist) {
  if (!dist.trusted_regular()) {
    const RegularityReport rep = check_regularity(dist);
    if (!rep.regular) {
      throw NotRegular("monopoly_quantile: distribution is not regular (worst R' increase " +
                       std::to_string(rep.worst_violation) + ")");
    }
  }
  return numerics::find_root([&](double q) { return dist.virtual_value(q); }, 0.0, 1.0);
}

RevenueCurve::RevenueCurve(AbilityDistribution dist)
    : dist_(std::move(dist)), kappa_star_(abilities::monopoly_quantile(dist_)) {}

double RevenueCurve::value(double q) const { return dist_.revenue(q); }
double RevenueCurve::derivative(double q) const { return dist_.virtual_value(q); }

AbilityDistribution aggregate(const PopulationMix& mix) {
  if (mix.components.empty()) throw DomainError("aggregate: empty mix");
  double total = 0.0;
  for (const auto& c : mix.components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw DomainError("aggregate: weights must lie in (0,1]");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("aggregate: weights must sum to 1");

  auto components = mix.components;
  double vb = 0.0;
  for (const auto& c : components) vb = std::max(vb, c.dist.v_bar());

  auto mixture_cdf = [components](double a) {
    double f = 0.0;
    for (const auto& c : components) f += c.weight * c.dist.cdf(a);
    return f;
  };
  auto value_fn = [mixture_cdf, vb](double q) {
    if (q <= 0.0) return vb;
    if (q >= 1.0) return 0.0;
    numerics::Tolerance tol;
    tol.abs_tol = 1e-13 * std::max(1.0, vb);
    return numerics::find_root(
        [&](double a) { return mixture_cdf(a) - (1.0 - q); }, 0.0, vb, tol);
  };
  return AbilityDistribution::custom(std::move(value_fn), "aggregate");
}

std::vector<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_samples: cannot open " + path);
  std::vector<double> samples;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    if (ls >> v) {
      samples.push_back(v);
    } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ConfigError("load_samples: bad line '" + line + "'");
    }
  }
  if (samples.empty()) throw ConfigError("load_samples: no samples in " + path);
  return samples;
}

}  // namespace badgeforge::abilities
