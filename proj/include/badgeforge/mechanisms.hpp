#pragma once

#include <optional>
#include <vector>

#include "badgeforge/abilities.hpp"
#include "badgeforge/status.hpp"

namespace badgeforge::mechanisms {

// Quantile thresholds kappa_1 >= ... >= kappa_m of an absolute-threshold
// mechanism, with the conventions kappa_0 = 1 and kappa_{m+1} = 0. Duplicates
// are removed on construction; the empty vector is the null mechanism.
class QuantileThresholds {
 public:
  QuantileThresholds() = default;
  explicit QuantileThresholds(std::vector<double> kappas);
  std::size_t size() const { return kappas_.size(); }
  bool empty() const { return kappas_.empty(); }
  double operator[](std::size_t i) const { return kappas_[i]; }
  const std::vector<double>& values() const { return kappas_; }

 private:
  std::vector<double> kappas_;
};

// Contribution thresholds 0 < theta_1 < ... < theta_m.
class ContributionThresholds {
 public:
  ContributionThresholds() = default;
  explicit ContributionThresholds(std::vector<double> thetas);
  std::size_t size() const { return thetas_.size(); }
  bool empty() const { return thetas_.empty(); }
  double operator[](std::size_t i) const { return thetas_[i]; }
  const std::vector<double>& values() const { return thetas_; }

 private:
  std::vector<double> thetas_;
};

// Everything a mechanism evaluation needs: the ability distribution, the
// status function, the market size, and the effort-cost exponent (costs are
// (b/v)^alpha; alpha = 1 is the base model).
struct MechanismContext {
  abilities::AbilityDistribution dist;
  status::StatusFunction stat;
  status::MarketSize market;
  double cost_exponent = 1.0;

  status::InterimStatus interim() const { return {stat, market}; }
};

struct OptimalCutoff {
  double theta_star;  // v(kappa*) * S_n(kappa*)
  double kappa_star;  // monopoly quantile
};

// Contribution threshold of the optimal leaderboard-with-cutoff mechanism.
OptimalCutoff optimal_cutoff(const MechanismContext& ctx);

// Equilibrium bid of the optimal mechanism:
// b(q) = v(q) S_n(q) + int_q^{kappa*} S_n(z) v'(z) dz for q <= kappa*, else 0.
double optimal_bid(const MechanismContext& ctx, double q);

// Per-user expected contribution of the optimal mechanism,
// int_0^{kappa*} R'(q) S_n(q) dq.
double optimal_contribution(const MechanismContext& ctx);

// theta_t = sum_{j<=t} v(kappa_j) (S_n(kappa_j) - S_n(kappa_{j-1})), adjusted
// for the cost exponent (the identity pins theta_t^alpha).
ContributionThresholds thresholds_from_quantiles(const MechanismContext& ctx,
                                                 const QuantileThresholds& kq);

// The unique symmetric equilibrium of an absolute-threshold mechanism.
struct EquilibriumSolution {
  int realized_levels = 0;          // p <= m; 0 means no participation
  QuantileThresholds kappas;        // length p
  ContributionThresholds thetas;    // the input thresholds (length m)
  std::vector<double> interim_levels;  // S_n(kappa_t), length p

  double bid(double q) const;                 // theta_t on (kappa_{t+1}, kappa_t]
  double interim_allocation(double q) const;  // S_n(kappa_t) on the same step
};

// Solves the threshold recursion: theta_1 = v(kappa_1) S_n(kappa_1), then
// theta_t - theta_{t-1} = v(kappa_t)(S_n(kappa_t) - S_n(kappa_{t-1})); the
// recursion stops early once no ability is willing to pay the next increment.
EquilibriumSolution quantiles_from_thresholds(const MechanismContext& ctx,
                                              const ContributionThresholds& ct);

// Per-user expected contribution of the absolute-threshold mechanism given by
// kq, at its unique symmetric equilibrium.
double absolute_contribution(const MechanismContext& ctx, const QuantileThresholds& kq);

// Per-user expected contribution of the leaderboard, optionally truncated at
// a quantile cutoff: int_0^{cutoff} R'(q) S_n(q) dq (cutoff = 1 when absent).
double leaderboard_contribution(const MechanismContext& ctx,
                                std::optional<double> cutoff = std::nullopt);

// Single badge at the median quantile.
QuantileThresholds construct_median();

// Single badge at min{kappa*, 1/2}.
QuantileThresholds construct_single_improved(const abilities::AbilityDistribution& dist);

// m >= 3 badges for concave (or linear) status: kappa_1 = kappa*, remaining
// thresholds equalize interim-status increments of (S_n(0) - S_n(kappa*)) / m.
QuantileThresholds construct_concave_m(const MechanismContext& ctx, int m);

// Geometric interim-status ladder for convex status: kappa_1 = min{kappa*,1/2},
// S_n(kappa_t) = S(0) / 2^(m-t+1) with m = ceil(log2(S(0)/S_n(kappa_1))).
QuantileThresholds construct_convex_logH(const MechanismContext& ctx);

// m badges for linear status: equal-width partition of [0, kappa*], i.e.
// kappa_t = kappa* (m - t + 1) / m, so every non-zero badge class holds the
// same expected share of the population.
QuantileThresholds construct_linear_m(const MechanismContext& ctx, int m);

// Contribution change from augmenting kq with one extra threshold; guaranteed
// non-negative only for kappa_new <= kappa*.
double add_badge_delta(const MechanismContext& ctx, const QuantileThresholds& kq,
                       double kappa_new);

// optimal_contribution / mechanism contribution; DivisionDegenerate on zero.
double approximation_ratio(const MechanismContext& ctx, double mechanism_contribution);
double approximation_ratio(const MechanismContext& ctx, const QuantileThresholds& kq);

// Tagged mechanism description used by the simulator and the CLI.
struct Mechanism {
  enum class Kind { optimal_leaderboard_cutoff, absolute_threshold, leaderboard };

  Kind kind;
  MechanismContext ctx;
  std::optional<QuantileThresholds> kappas;        // absolute: either form
  std::optional<ContributionThresholds> thetas;
  std::optional<double> cutoff;                    // leaderboard quantile cutoff

  Mechanism(Kind k, MechanismContext c) : kind(k), ctx(std::move(c)) {}

  static Mechanism optimal(MechanismContext ctx);
  static Mechanism absolute_from_kappas(MechanismContext ctx, QuantileThresholds kq);
  static Mechanism absolute_from_thetas(MechanismContext ctx, ContributionThresholds ct);
  static Mechanism leaderboard(MechanismContext ctx,
                               std::optional<double> cutoff = std::nullopt);
};

}  // namespace badgeforge::mechanisms
