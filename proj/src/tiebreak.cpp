#include "badgeforge/tiebreak.hpp"

#include <cmath>
#include <utility>

#include "badgeforge/mechanisms.hpp"
#include "badgeforge/numerics.hpp"
#include "badgeforge/status.hpp"

namespace badgeforge::tiebreak {

TieBreakModel::TieBreakModel(double beta_in, abilities::AbilityDistribution dist_in)
    : beta(beta_in), dist(std::move(dist_in)) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("TieBreakModel: beta in [0,1] required");
}

std::vector<double> single_badge_equilibria(const TieBreakModel& model, double theta,
                                            int grid) {
  if (!(theta > 0.0)) throw DomainError("single_badge_equilibria: theta > 0 required");
  const double beta = model.beta;
  auto indifference = [&](double k) {
    return model.dist.value(k) * (k * (1.0 - 2.0 * beta) + beta) - theta;
  };
  std::vector<double> roots = numerics::find_all_roots(indifference, 0.0, 1.0, grid);
  std::erase_if(roots, [](double r) { return r <= 0.0 || r >= 1.0; });
  return roots;
}

MedianResult median_tiebreak_contribution(const TieBreakModel& model) {
  const double ks = abilities::monopoly_quantile(model.dist);
  return {model.dist.revenue(0.5) / 2.0, model.dist.revenue(ks)};
}

double leaderboard_tiebreak_contribution(const TieBreakModel& model) {
  abilities::monopoly_quantile(model.dist);  // regularity gate
  return numerics::integrate([&](double q) { return model.dist.revenue(q); }, 0.0, 1.0);
}

const char* structure_name(OptimalStructure s) {
  switch (s) {
    case OptimalStructure::leaderboard_with_cutoff: return "leaderboard-with-cutoff";
    case OptimalStructure::full_leaderboard: return "full-leaderboard";
    case OptimalStructure::top_badge_then_ranking: return "top-badge-then-ranking";
    case OptimalStructure::single_badge: return "single-badge";
  }
  return "unknown";
}

OptimalTieBreak optimal_tiebreak(const TieBreakModel& model) {
  const double beta = model.beta;
  const auto& dist = model.dist;
  if (beta == 1.0) {
    mechanisms::MechanismContext ctx{dist, status::StatusFunction::linear(),
                                     status::MarketSize::large()};
    const auto cutoff = mechanisms::optimal_cutoff(ctx);
    return {OptimalStructure::leaderboard_with_cutoff, cutoff.theta_star,
            mechanisms::optimal_contribution(ctx)};
  }
  if (beta == 0.5) {
    const double opt =
        numerics::integrate([&](double q) { return dist.revenue(q); }, 0.0, 1.0);
    return {OptimalStructure::full_leaderboard, 0.0, opt};
  }
  if (beta == 0.0) {
    const double ks = abilities::monopoly_quantile(dist);
    const double theta =
        dist.value(ks) * ks +
        numerics::integrate([&](double q) { return dist.value(q); }, ks, 1.0);
    const double opt =
        dist.revenue(ks) * ks +
        numerics::integrate([&](double q) { return dist.revenue(q); }, ks, 1.0);
    return {OptimalStructure::top_badge_then_ranking, theta, opt};
  }
  throw UnsupportedBeta(
      "optimal_tiebreak: structured optimum exists only for beta in {0, 1/2, 1}");
}

std::pair<double, double> random_winner_single_badge(const TieBreakModel& model,
                                                     double kappa) {
  if (std::abs(model.beta - 0.5) > 1e-12) {
    throw UnsupportedBeta("random_winner_single_badge: requires beta = 1/2");
  }
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw DomainError("random_winner_single_badge: kappa in (0,1) required");
  }
  return {model.dist.value(kappa) / 2.0, model.dist.revenue(kappa) / 2.0};
}

OptimalTieBreak everyone_wins_single_badge(const TieBreakModel& model) {
  const double ks = abilities::monopoly_quantile(model.dist);
  const double theta = model.dist.revenue(ks);
  return {OptimalStructure::single_badge, theta, ks * theta};
}

}  // namespace badgeforge::tiebreak
