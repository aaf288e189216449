#pragma once

#include <cstdint>
#include <vector>

#include "badgeforge/mechanisms.hpp"
#include "badgeforge/rng.hpp"

namespace badgeforge::mc {

struct Population {
  std::vector<double> quantiles;  // i.i.d. uniform in [0,1]
  std::uint64_t seed = 0;

  long n() const { return static_cast<long>(quantiles.size()); }
};

Population sample_population(long n, std::uint64_t seed);

struct ExPostOutcome {
  std::vector<double> bids;
  std::vector<int> badges;      // 0 = lowest
  std::vector<double> statuses; // realized status values S(t_i)
  double total_contribution = 0.0;
};

// A mechanism with its equilibrium solved and the bid function tabulated, so
// one realization costs O(n log n). Requires a finite market size.
class SolvedMechanism {
 public:
  explicit SolvedMechanism(mechanisms::Mechanism mech);

  // One realization: everyone plays the equilibrium bid of their quantile,
  // badges follow the mechanism rule (ranking ties broken by a uniform random
  // permutation drawn from tie_seed), and each status is S of the fraction of
  // opponents holding a weakly higher badge.
  ExPostOutcome play(const Population& pop, std::uint64_t tie_seed = 0) const;

  double bid_at(double q) const;
  double analytic_contribution() const;

  const mechanisms::Mechanism& mechanism() const { return mech_; }
  const mechanisms::EquilibriumSolution& equilibrium() const { return eq_; }
  bool is_absolute() const;
  double quantile_cutoff() const { return cutoff_; }

  // Expected utility of bidding `bid` at quantile-type q, against opponents
  // playing the equilibrium (exact interim expectation; used by tests).
  double interim_utility(double q, double bid) const;

 private:
  int badge_level(double q) const;  // absolute mechanisms

  mechanisms::Mechanism mech_;
  mechanisms::EquilibriumSolution eq_;  // absolute only
  double cutoff_ = 1.0;                 // ranking mechanisms: quantile cutoff
  double theta_star_ = 0.0;             // ranking mechanisms: bid at the cutoff
  std::vector<double> bid_grid_;        // tabulated decreasing bid on [0, cutoff]
};

struct EstimateReport {
  double mean = 0.0;
  double stderr_ = 0.0;
  long trials = 0;
};

// Sample mean of the per-user contribution over independent trial populations.
EstimateReport estimate_contribution(const SolvedMechanism& sm, long n, long trials,
                                     std::uint64_t seed);

struct RegretReport {
  double regret = 0.0;   // max estimated deviation gain across types/bids
  double stderr_ = 0.0;  // standard error of that estimate
};

// Interim best-response check: for each tested type, the expected utility of
// each candidate deviation bid (every threshold exactly, plus an interstitial
// grid up to b(0)) is estimated against `trials` resampled opponent profiles
// drawn with common random numbers. For n = 2 the opponent expectation is
// computed exactly instead of sampled.
RegretReport verify_bne(const SolvedMechanism& sm, long n, int deviation_grid,
                        int type_grid, long trials, std::uint64_t seed);

// Same check with players following the step strategy `played` instead of the
// solved equilibrium; used as a power check that the estimator detects
// non-equilibrium play.
RegretReport verify_bne_played(const SolvedMechanism& sm,
                               const mechanisms::QuantileThresholds& played, long n,
                               int deviation_grid, int type_grid, long trials,
                               std::uint64_t seed);

// Flags, per player, whether switching to another badge level gains more than
// epsilon against the realized opponents.
std::vector<bool> expost_regret_flags(const SolvedMechanism& sm, const Population& pop,
                                      double epsilon, std::uint64_t tie_seed = 0);

// Fraction of realizations in which at least one player has an epsilon-improving
// ex-post deviation.
double expost_regret_frequency(const SolvedMechanism& sm, long n, long trials,
                               double epsilon, std::uint64_t seed);

struct VirtualSurplusAssignment {
  std::vector<int> badges;  // distinct integers, higher = better; 0 = pooled bottom
  double value = 0.0;
};

// Exhaustive search over all ordered set partitions of at most six players,
// maximizing sum_i R'(q_i) S(t_i). Oracle for the structure of the
// surplus-maximizing allocation.
VirtualSurplusAssignment brute_force_virtual_surplus(
    const std::vector<double>& quantiles, const abilities::AbilityDistribution& dist,
    const status::StatusFunction& stat);

// Value of the reference structure: distinct decreasing badges for the
// non-negative virtual-value players, pooled zero badge for the rest.
double reference_surplus_value(const std::vector<double>& quantiles,
                               const abilities::AbilityDistribution& dist,
                               const status::StatusFunction& stat);

struct ResidualReport {
  double residual = 0.0;     // |E[sum b] - E[sum R' x]| / E[sum b], 0 when 0/0
  double z = 0.0;            // paired z-score of the difference
  double mean_bids = 0.0;
  double mean_surplus = 0.0;
};

// Monte Carlo check of the payment identity: expected total contribution
// equals expected virtual surplus, estimated from the same draws.
ResidualReport virtual_surplus_identity(const SolvedMechanism& sm, long n, long trials,
                                        std::uint64_t seed);

struct SimulationReport {
  double mean_contribution = 0.0;
  double stderr_ = 0.0;
  long trials = 0;
  double interim_regret = 0.0;
  double interim_regret_stderr = 0.0;
  double expost_regret_freq = 0.0;
  double vs_residual = 0.0;
  double vs_z = 0.0;
};

struct SimulationParams {
  long n = 1000;
  long trials = 400;
  std::uint64_t seed = 1;
  int deviation_grid = 32;
  int type_grid = 9;
  long regret_trials = 400;
  double epsilon = 0.05;
  long expost_trials = 400;
};

SimulationReport simulate(const SolvedMechanism& sm, const SimulationParams& params);

}  // namespace badgeforge::mc
