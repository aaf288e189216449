#include "badgeforge/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "badgeforge/numerics.hpp"

namespace badgeforge::mechanisms {

namespace {

using status::InterimStatus;
using status::Shape;

// Step-sum form of the expected contribution: sum_t S_n(kappa_t) *
// (R(kappa_t) - R(kappa_{t+1})). Used as the internal cross-check against the
// theta-weighted cell sum.
double revenue_step_sum(const MechanismContext& ctx, const QuantileThresholds& kq,
                        const std::vector<double>& interim_levels) {
  double total = 0.0;
  for (std::size_t t = 0; t < kq.size(); ++t) {
    const double r_hi = ctx.dist.revenue(kq[t]);
    const double r_lo = (t + 1 < kq.size()) ? ctx.dist.revenue(kq[t + 1]) : 0.0;
    total += interim_levels[t] * (r_hi - r_lo);
  }
  return total;
}

}  // namespace

QuantileThresholds::QuantileThresholds(std::vector<double> kappas) {
  for (double k : kappas) {
    if (!(k >= 0.0 && k <= 1.0)) {
      throw DomainError("QuantileThresholds: kappa outside [0,1]");
    }
  }
  std::sort(kappas.begin(), kappas.end(), std::greater<>());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());
  kappas_ = std::move(kappas);
}

ContributionThresholds::ContributionThresholds(std::vector<double> thetas) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0)) {
      throw DomainError("ContributionThresholds: thresholds must be positive");
    }
    if (i > 0 && !(thetas[i] > thetas[i - 1])) {
      throw DomainError("ContributionThresholds: thresholds must be strictly increasing");
    }
  }
  thetas_ = std::move(thetas);
}

OptimalCutoff optimal_cutoff(const MechanismContext& ctx) {
  const double ks = abilities::monopoly_quantile(ctx.dist);
  const InterimStatus is = ctx.interim();
  return {ctx.dist.value(ks) * is.value(ks), ks};
}

double optimal_bid(const MechanismContext& ctx, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("optimal_bid: q in [0,1] required");
  const double ks = abilities::monopoly_quantile(ctx.dist);
  if (q > ks) return 0.0;
  const InterimStatus is = ctx.interim();
  const double tail = numerics::integrate(
      [&](double z) { return is.value(z) * ctx.dist.value_derivative(z); }, q, ks);
  return ctx.dist.value(q) * is.value(q) + tail;
}

double optimal_contribution(const MechanismContext& ctx) {
  const double ks = abilities::monopoly_quantile(ctx.dist);
  const InterimStatus is = ctx.interim();
  return numerics::integrate(
      [&](double q) { return ctx.dist.virtual_value(q) * is.value(q); }, 0.0, ks);
}

ContributionThresholds thresholds_from_quantiles(const MechanismContext& ctx,
                                                 const QuantileThresholds& kq) {
  const InterimStatus is = ctx.interim();
  std::vector<double> thetas;
  thetas.reserve(kq.size());
  double cumulative = 0.0;  // theta_t^alpha
  double prev_interim = 0.0;  // S_n(kappa_0) = S_n(1) = 0
  for (std::size_t t = 0; t < kq.size(); ++t) {
    const double s = is.value(kq[t]);
    cumulative += ctx.dist.value(kq[t]) * (s - prev_interim);
    prev_interim = s;
    thetas.push_back(ctx.cost_exponent == 1.0
                         ? cumulative
                         : std::pow(cumulative, 1.0 / ctx.cost_exponent));
  }
  return ContributionThresholds(std::move(thetas));
}

double EquilibriumSolution::bid(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("bid: q in [0,1] required");
  int level = 0;
  for (int t = 0; t < realized_levels; ++t) {
    if (q <= kappas[t]) level = t + 1;
  }
  return level == 0 ? 0.0 : thetas[level - 1];
}

double EquilibriumSolution::interim_allocation(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("interim_allocation: q in [0,1] required");
  int level = 0;
  for (int t = 0; t < realized_levels; ++t) {
    if (q <= kappas[t]) level = t + 1;
  }
  return level == 0 ? 0.0 : interim_levels[level - 1];
}

EquilibriumSolution quantiles_from_thresholds(const MechanismContext& ctx,
                                              const ContributionThresholds& ct) {
  const InterimStatus is = ctx.interim();
  const double alpha = ctx.cost_exponent;
  const double s_top = ctx.stat.top();
  const double v_bar = ctx.dist.v_bar();

  EquilibriumSolution sol;
  sol.thetas = ct;

  std::vector<double> kappas;
  std::vector<double> levels;
  double prev_kappa = 1.0;
  double prev_interim = 0.0;
  double prev_theta_a = 0.0;
  for (std::size_t t = 0; t < ct.size(); ++t) {
    const double theta_a = alpha == 1.0 ? ct[t] : std::pow(ct[t], alpha);
    const double increment = theta_a - prev_theta_a;
    // Willingness of the strongest type to step up to this level. Stopping
    // when the increment is out of reach is exactly the boundary inequality
    // that certifies the truncated profile as the equilibrium.
    const double top_gain = v_bar * (s_top - prev_interim);
    if (!(increment < top_gain)) break;
    auto gap = [&](double k) {
      return ctx.dist.value(k) * (is.value(k) - prev_interim) - increment;
    };
    numerics::Tolerance tight;
    tight.abs_tol = 1e-13;
    tight.rel_tol = 1e-13;
    const double kappa = numerics::find_root(gap, 0.0, prev_kappa, tight);
    kappas.push_back(kappa);
    levels.push_back(is.value(kappa));
    prev_kappa = kappa;
    prev_interim = levels.back();
    prev_theta_a = theta_a;
  }
  sol.realized_levels = static_cast<int>(kappas.size());
  sol.kappas = QuantileThresholds(std::move(kappas));
  sol.interim_levels = std::move(levels);
  return sol;
}

double absolute_contribution(const MechanismContext& ctx, const QuantileThresholds& kq) {
  if (kq.empty()) return 0.0;
  const InterimStatus is = ctx.interim();
  const ContributionThresholds thetas = thresholds_from_quantiles(ctx, kq);

  std::vector<double> levels(kq.size());
  for (std::size_t t = 0; t < kq.size(); ++t) levels[t] = is.value(kq[t]);

  double total = 0.0;
  double total_translated = 0.0;  // theta^alpha-weighted, equals virtual surplus
  for (std::size_t t = 0; t < kq.size(); ++t) {
    const double lo = (t + 1 < kq.size()) ? kq[t + 1] : 0.0;
    const double mass = kq[t] - lo;
    total += mass * thetas[t];
    total_translated += mass * (ctx.cost_exponent == 1.0
                                    ? thetas[t]
                                    : std::pow(thetas[t], ctx.cost_exponent));
  }
  const double vs = revenue_step_sum(ctx, kq, levels);
  if (std::abs(total_translated - vs) > 1e-9 * std::max(1.0, std::abs(vs))) {
    throw Error("absolute_contribution: virtual-surplus cross-check failed");
  }
  return total;
}

double leaderboard_contribution(const MechanismContext& ctx, std::optional<double> cutoff) {
  double hi = 1.0;
  if (cutoff) {
    if (!(*cutoff >= 0.0 && *cutoff <= 1.0)) {
      throw DomainError("leaderboard_contribution: cutoff in [0,1] required");
    }
    hi = *cutoff;
  }
  const InterimStatus is = ctx.interim();
  return numerics::integrate(
      [&](double q) { return ctx.dist.virtual_value(q) * is.value(q); }, 0.0, hi);
}

QuantileThresholds construct_median() { return QuantileThresholds({0.5}); }

QuantileThresholds construct_single_improved(const abilities::AbilityDistribution& dist) {
  return QuantileThresholds({std::min(abilities::monopoly_quantile(dist), 0.5)});
}

QuantileThresholds construct_concave_m(const MechanismContext& ctx, int m) {
  if (m < 3) throw DomainError("construct_concave_m: m >= 3 required");
  const Shape shape = ctx.stat.shape();
  if (shape != Shape::concave && shape != Shape::linear) {
    throw ShapeMismatch("construct_concave_m: requires concave or linear status");
  }
  const double ks = abilities::monopoly_quantile(ctx.dist);
  const InterimStatus is = ctx.interim();
  const double s_star = is.value(ks);
  const double delta = (ctx.stat.top() - s_star) / m;
  std::vector<double> kappas{ks};
  for (int t = 2; t <= m; ++t) {
    kappas.push_back(is.inverse(s_star + (t - 1) * delta));
  }
  return QuantileThresholds(std::move(kappas));
}

QuantileThresholds construct_convex_logH(const MechanismContext& ctx) {
  if (ctx.stat.shape() != Shape::convex) {
    throw ShapeMismatch("construct_convex_logH: requires convex status");
  }
  const double ks = abilities::monopoly_quantile(ctx.dist);
  const double lambda = std::min(ks, 0.5);
  const InterimStatus is = ctx.interim();
  const double s_top = ctx.stat.top();
  const double s_lambda = is.value(lambda);
  const int m = std::max(1, static_cast<int>(std::ceil(std::log2(s_top / s_lambda))));
  std::vector<double> kappas{lambda};
  for (int t = 2; t <= m; ++t) {
    const double target = s_top / std::pow(2.0, m - t + 1);
    if (target <= s_lambda) continue;  // ladder truncated at lambda
    kappas.push_back(is.inverse(target));
  }
  return QuantileThresholds(std::move(kappas));
}

QuantileThresholds construct_linear_m(const MechanismContext& ctx, int m) {
  if (m < 1) throw DomainError("construct_linear_m: m >= 1 required");
  if (ctx.stat.shape() != Shape::linear) {
    throw ShapeMismatch("construct_linear_m: requires linear status");
  }
  const double ks = abilities::monopoly_quantile(ctx.dist);
  std::vector<double> kappas;
  kappas.reserve(m);
  for (int t = 1; t <= m; ++t) {
    kappas.push_back(ks * (m - t + 1) / m);
  }
  return QuantileThresholds(std::move(kappas));
}

double add_badge_delta(const MechanismContext& ctx, const QuantileThresholds& kq,
                       double kappa_new) {
  if (!(kappa_new >= 0.0 && kappa_new <= 1.0)) {
    throw DomainError("add_badge_delta: kappa_new in [0,1] required");
  }
  std::vector<double> augmented = kq.values();
  augmented.push_back(kappa_new);
  return absolute_contribution(ctx, QuantileThresholds(std::move(augmented))) -
         absolute_contribution(ctx, kq);
}

double approximation_ratio(const MechanismContext& ctx, double mechanism_contribution) {
  if (!(std::abs(mechanism_contribution) > 1e-300)) {
    throw DivisionDegenerate("approximation_ratio: mechanism contribution is zero");
  }
  return optimal_contribution(ctx) / mechanism_contribution;
}

double approximation_ratio(const MechanismContext& ctx, const QuantileThresholds& kq) {
  return approximation_ratio(ctx, absolute_contribution(ctx, kq));
}

Mechanism Mechanism::optimal(MechanismContext ctx) {
  return Mechanism(Kind::optimal_leaderboard_cutoff, std::move(ctx));
}

Mechanism Mechanism::absolute_from_kappas(MechanismContext ctx, QuantileThresholds kq) {
  Mechanism m(Kind::absolute_threshold, std::move(ctx));
  m.kappas = std::move(kq);
  return m;
}

Mechanism Mechanism::absolute_from_thetas(MechanismContext ctx, ContributionThresholds ct) {
  Mechanism m(Kind::absolute_threshold, std::move(ctx));
  m.thetas = std::move(ct);
  return m;
}

Mechanism Mechanism::leaderboard(MechanismContext ctx, std::optional<double> cutoff) {
  Mechanism m(Kind::leaderboard, std::move(ctx));
  m.cutoff = cutoff;
  return m;
}

}  // namespace badgeforge::mechanisms
