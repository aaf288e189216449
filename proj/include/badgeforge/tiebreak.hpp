#pragma once

#include <utility>
#include <vector>

#include "badgeforge/abilities.hpp"

namespace badgeforge::tiebreak {

// Tie-generalized model: linear status 1 - beta*t_e - t_g in the large-market
// limit, where beta is the probability of losing against an equally ranked
// opponent. Non-linear status is out of scope for this module.
struct TieBreakModel {
  double beta;
  abilities::AbilityDistribution dist;

  TieBreakModel(double beta, abilities::AbilityDistribution dist);
};

// All kappa in (0,1) solving the boundary indifference equation
// v(kappa) (kappa (1 - 2 beta) + beta) = theta. At most one root for
// beta >= 1/2; the empty list means no participating equilibrium at theta.
std::vector<double> single_badge_equilibria(const TieBreakModel& model, double theta,
                                            int grid = 10000);

struct MedianResult {
  double contribution;  // R(1/2) / 2, independent of beta
  double opt_bound;     // R(kappa*): upper bound on any mechanism's per-user take
};

// The single-badge mechanism with contribution threshold v(1/2)/2: half the
// population earns the badge at every beta.
MedianResult median_tiebreak_contribution(const TieBreakModel& model);

// Full ranking, no cutoff: per-user contribution int_0^1 R(q) dq; ties have
// measure zero so the value does not depend on beta.
double leaderboard_tiebreak_contribution(const TieBreakModel& model);

enum class OptimalStructure {
  leaderboard_with_cutoff,   // beta = 1
  full_leaderboard,          // beta = 1/2
  top_badge_then_ranking,    // beta = 0
  single_badge,              // everyone-wins variant
};

const char* structure_name(OptimalStructure s);

struct OptimalTieBreak {
  OptimalStructure structure;
  double threshold;     // contribution cutoff (0 when the structure has none)
  double contribution;  // per-user expected contribution
};

// The optimal mechanism has a clean structure only at beta in {0, 1/2, 1};
// UnsupportedBeta otherwise.
OptimalTieBreak optimal_tiebreak(const TieBreakModel& model);

// beta = 1/2 single badge at quantile kappa: theta = v(kappa)/2 and per-user
// contribution R(kappa)/2.
std::pair<double, double> random_winner_single_badge(const TieBreakModel& model,
                                                     double kappa);

// Variant under the normalization where unbadged opponents cost nothing
// (status 1 - t_g): a single badge at the monopoly quantile with threshold
// R(kappa*) is optimal. Kept separate from the beta = 0 structural result
// because the two use different status normalizations.
OptimalTieBreak everyone_wins_single_badge(const TieBreakModel& model);

}  // namespace badgeforge::tiebreak
