#include "badgeforge/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "badgeforge/numerics.hpp"

namespace badgeforge::mc {

namespace {

using mechanisms::ContributionThresholds;
using mechanisms::Mechanism;
using mechanisms::QuantileThresholds;

// Running mean/variance accumulator.
struct Welford {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
  double stderr_() const { return count > 1 ? std::sqrt(variance() / count) : 0.0; }
};

int strategy_level(const std::vector<double>& kappas_desc, double q) {
  int level = 0;
  for (std::size_t t = 0; t < kappas_desc.size(); ++t) {
    if (q <= kappas_desc[t]) level = static_cast<int>(t) + 1;
  }
  return level;
}

}  // namespace

Population sample_population(long n, std::uint64_t seed) {
  if (n < 2) throw DomainError("sample_population: n >= 2 required");
  Population pop;
  pop.seed = seed;
  pop.quantiles.resize(n);
  Rng rng(seed);
  for (auto& q : pop.quantiles) q = rng.uniform();
  return pop;
}

SolvedMechanism::SolvedMechanism(Mechanism mech) : mech_(std::move(mech)) {
  const auto& ctx = mech_.ctx;
  if (ctx.market.is_large()) {
    throw DomainError("SolvedMechanism: simulation requires a finite market size");
  }
  if (mech_.kind != Mechanism::Kind::absolute_threshold && ctx.cost_exponent != 1.0) {
    throw DomainError("SolvedMechanism: ranking mechanisms support cost_exponent = 1 only");
  }

  if (mech_.kind == Mechanism::Kind::absolute_threshold) {
    if (mech_.thetas) {
      eq_ = mechanisms::quantiles_from_thresholds(ctx, *mech_.thetas);
    } else if (mech_.kappas) {
      eq_.thetas = mechanisms::thresholds_from_quantiles(ctx, *mech_.kappas);
      eq_.kappas = *mech_.kappas;
      eq_.realized_levels = static_cast<int>(mech_.kappas->size());
      const auto is = ctx.interim();
      for (std::size_t t = 0; t < mech_.kappas->size(); ++t) {
        eq_.interim_levels.push_back(is.value((*mech_.kappas)[t]));
      }
    } else {
      throw DomainError("SolvedMechanism: absolute mechanism needs kappas or thetas");
    }
    return;
  }

  // Ranking mechanisms: tabulate the decreasing bid curve on [0, cutoff].
  if (mech_.kind == Mechanism::Kind::optimal_leaderboard_cutoff) {
    cutoff_ = abilities::monopoly_quantile(ctx.dist);
  } else {
    cutoff_ = mech_.cutoff.value_or(1.0);
    if (!(cutoff_ >= 0.0 && cutoff_ <= 1.0)) {
      throw DomainError("SolvedMechanism: cutoff in [0,1] required");
    }
  }
  if (cutoff_ <= 0.0) return;  // degenerate: nobody earns a badge

  const auto is = ctx.interim();
  theta_star_ = ctx.dist.value(cutoff_) * is.value(cutoff_);

  constexpr int kGrid = 2048;
  // S_n(x) v'(x); v' can blow up where S_n vanishes (e.g. power curves at
  // q = 1), but the product tends to zero there.
  auto sv_at = [&](double x) {
    const double s = is.value(x);
    if (s == 0.0) return 0.0;
    const double r = s * ctx.dist.value_derivative(x);
    if (std::isfinite(r)) return r;
    return is.value(x * (1.0 - 1e-9)) * ctx.dist.value_derivative(x * (1.0 - 1e-9));
  };
  std::vector<double> sv(kGrid + 1);       // S_n(x_j) v'(x_j)
  std::vector<double> sv_mid(kGrid);       // at interval midpoints
  std::vector<double> head(kGrid + 1);     // v(x_j) S_n(x_j)
  for (int j = 0; j <= kGrid; ++j) {
    const double x = cutoff_ * j / kGrid;
    sv[j] = sv_at(x);
    head[j] = ctx.dist.value(x) * is.value(x);
    if (j < kGrid) sv_mid[j] = sv_at(cutoff_ * (j + 0.5) / kGrid);
  }
  bid_grid_.assign(kGrid + 1, 0.0);
  double tail = 0.0;  // int_{x_j}^{cutoff} S_n v'
  bid_grid_[kGrid] = head[kGrid];
  const double h = cutoff_ / kGrid;
  for (int j = kGrid - 1; j >= 0; --j) {
    tail += h / 6.0 * (sv[j] + 4.0 * sv_mid[j] + sv[j + 1]);
    bid_grid_[j] = head[j] + tail;
  }
}

bool SolvedMechanism::is_absolute() const {
  return mech_.kind == Mechanism::Kind::absolute_threshold;
}

int SolvedMechanism::badge_level(double q) const {
  return strategy_level(eq_.kappas.values(), q);
}

double SolvedMechanism::bid_at(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("bid_at: q in [0,1] required");
  if (is_absolute()) return eq_.bid(q);
  if (cutoff_ <= 0.0 || q > cutoff_) return 0.0;
  const double pos = q / cutoff_ * (bid_grid_.size() - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(pos), bid_grid_.size() - 2);
  const double frac = pos - j;
  return bid_grid_[j] * (1.0 - frac) + bid_grid_[j + 1] * frac;
}

double SolvedMechanism::analytic_contribution() const {
  const auto& ctx = mech_.ctx;
  if (is_absolute()) {
    double total = 0.0;
    for (int t = 0; t < eq_.realized_levels; ++t) {
      const double lo = (t + 1 < eq_.realized_levels) ? eq_.kappas[t + 1] : 0.0;
      total += (eq_.kappas[t] - lo) * eq_.thetas[t];
    }
    return total;
  }
  if (mech_.kind == Mechanism::Kind::optimal_leaderboard_cutoff) {
    return mechanisms::optimal_contribution(ctx);
  }
  return mechanisms::leaderboard_contribution(ctx, cutoff_);
}

ExPostOutcome SolvedMechanism::play(const Population& pop, std::uint64_t tie_seed) const {
  const long n = pop.n();
  if (n < 2) throw DomainError("play: population of at least two players required");
  const auto& ctx = mech_.ctx;
  ExPostOutcome out;
  out.bids.resize(n);
  out.badges.resize(n);
  out.statuses.resize(n);

  if (is_absolute()) {
    const int p = eq_.realized_levels;
    std::vector<long> count(p + 1, 0);
    for (long i = 0; i < n; ++i) {
      const int level = badge_level(pop.quantiles[i]);
      out.badges[i] = level;
      out.bids[i] = level == 0 ? 0.0 : eq_.thetas[level - 1];
      ++count[level];
    }
    // suffix[b] = number of players with badge >= b
    std::vector<long> suffix(p + 2, 0);
    for (int b = p; b >= 0; --b) suffix[b] = suffix[b + 1] + count[b];
    for (long i = 0; i < n; ++i) {
      const long weakly_higher = suffix[out.badges[i]] - 1;  // opponents only
      out.statuses[i] = ctx.stat.value(static_cast<double>(weakly_higher) / (n - 1));
    }
  } else {
    Rng tie_rng(tie_seed);
    std::vector<double> tie_key(n);
    for (long i = 0; i < n; ++i) tie_key[i] = tie_rng.uniform();

    std::vector<long> earners;
    earners.reserve(n);
    for (long i = 0; i < n; ++i) {
      const double q = pop.quantiles[i];
      const bool earned = cutoff_ > 0.0 && q <= cutoff_;
      out.bids[i] = earned ? bid_at(q) : 0.0;
      if (earned) {
        earners.push_back(i);
      } else {
        out.badges[i] = 0;
        out.statuses[i] = ctx.stat.value(1.0);
      }
    }
    std::sort(earners.begin(), earners.end(), [&](long a, long b) {
      if (out.bids[a] != out.bids[b]) return out.bids[a] > out.bids[b];
      return tie_key[a] < tie_key[b];
    });
    for (std::size_t r = 0; r < earners.size(); ++r) {
      const long i = earners[r];
      out.badges[i] = static_cast<int>(n - r);  // distinct, higher = better
      out.statuses[i] = ctx.stat.value(static_cast<double>(r) / (n - 1));
    }
  }
  out.total_contribution = std::accumulate(out.bids.begin(), out.bids.end(), 0.0);
  return out;
}

double SolvedMechanism::interim_utility(double q, double bid) const {
  const auto& ctx = mech_.ctx;
  const double alpha = ctx.cost_exponent;
  const double vv = alpha == 1.0 ? ctx.dist.value(q) : std::pow(ctx.dist.value(q), alpha);
  const double cost = alpha == 1.0 ? bid : std::pow(bid, alpha);
  const auto is = ctx.interim();
  if (is_absolute()) {
    int level = 0;
    for (std::size_t t = 0; t < eq_.thetas.size(); ++t) {
      if (bid >= eq_.thetas[t]) level = static_cast<int>(t) + 1;
    }
    // Levels above the realized count attract no opponents: full top status.
    double s;
    if (level == 0) {
      s = ctx.stat.value(1.0);
    } else if (level <= eq_.realized_levels) {
      s = is.value(eq_.kappas[level - 1]);
    } else {
      s = ctx.stat.top();
    }
    return vv * s - cost;
  }
  if (cutoff_ <= 0.0) return -cost;
  if (bid < theta_star_ && cutoff_ < 1.0) return -cost;
  const double z = bid >= bid_grid_[0] ? 0.0 : [&] {
    // invert the decreasing tabulated bid curve
    std::size_t lo = 0, hi = bid_grid_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (bid_grid_[mid] >= bid ? lo : hi) = mid;
    }
    const double span = bid_grid_[lo] - bid_grid_[hi];
    const double frac = span > 0.0 ? (bid_grid_[lo] - bid) / span : 0.0;
    return cutoff_ * (lo + frac) / (bid_grid_.size() - 1);
  }();
  return vv * is.value(z) - cost;
}

EstimateReport estimate_contribution(const SolvedMechanism& sm, long n, long trials,
                                     std::uint64_t seed) {
  if (trials < 2) throw DomainError("estimate_contribution: trials >= 2 required");
  Welford acc;
  for (long t = 0; t < trials; ++t) {
    Rng r = Rng::for_trial(seed, t);
    const Population pop = sample_population(n, r.next());
    const ExPostOutcome out = sm.play(pop, r.next());
    acc.add(out.total_contribution / n);
  }
  return {acc.mean, acc.stderr_(), trials};
}

namespace {

// Shared interim-regret estimator for absolute mechanisms. `strategy` is the
// step profile the players follow; at equilibrium it is the solved kappa
// vector, the power check passes a deliberately wrong one.
RegretReport verify_absolute(const SolvedMechanism& sm, const std::vector<double>& strategy,
                             long n, int deviation_grid, int type_grid, long trials,
                             std::uint64_t seed) {
  const auto& ctx = sm.mechanism().ctx;
  const auto& thetas = sm.equilibrium().thetas;
  const double alpha = ctx.cost_exponent;
  const std::size_t m = thetas.size();
  const int strategy_levels = static_cast<int>(strategy.size());

  auto bid_of_level = [&](int level) { return level == 0 ? 0.0 : thetas[level - 1]; };
  auto cost_of = [&](double b) { return alpha == 1.0 ? b : std::pow(b, alpha); };
  auto vpow = [&](double v) { return alpha == 1.0 ? v : std::pow(v, alpha); };

  // Types: a uniform grid plus every strategy threshold (the boundary types
  // are the binding ones).
  std::vector<double> types;
  for (int i = 0; i < type_grid; ++i) types.push_back((i + 0.5) / type_grid);
  for (double k : strategy) {
    if (k > 0.0 && k < 1.0) types.push_back(k);
  }

  // Deviations: every threshold exactly, plus an interstitial grid up to the
  // largest bid anyone places.
  std::vector<double> deviations{0.0};
  for (std::size_t t = 0; t < m; ++t) deviations.push_back(thetas[t]);
  const double top_bid = bid_of_level(strategy_levels);
  for (int j = 1; j <= deviation_grid; ++j) {
    deviations.push_back(top_bid * j / (deviation_grid + 1));
  }
  std::sort(deviations.begin(), deviations.end());
  deviations.erase(std::unique(deviations.begin(), deviations.end()), deviations.end());

  auto level_of_bid = [&](double d) {
    int level = 0;
    for (std::size_t t = 0; t < m; ++t) {
      if (d >= thetas[t]) level = static_cast<int>(t) + 1;
    }
    return level;
  };

  if (n == 2) {
    // Exact opponent expectation: the opponent is weakly higher with
    // probability strategy[level - 1] (1 for the zero badge).
    double worst = -1e300;
    for (double q : types) {
      const double vv = vpow(ctx.dist.value(q));
      auto utility = [&](double d) {
        const int level = level_of_bid(d);
        const double p_higher =
            level == 0 ? 1.0 : (level <= strategy_levels ? strategy[level - 1] : 0.0);
        const double s =
            p_higher * ctx.stat.value(1.0) + (1.0 - p_higher) * ctx.stat.value(0.0);
        return vv * s - cost_of(d);
      };
      const double u_eq = utility(bid_of_level(strategy_level(strategy, q)));
      for (double d : deviations) worst = std::max(worst, utility(d) - u_eq);
    }
    return {worst, 0.0};
  }

  std::vector<std::vector<Welford>> gains(types.size(),
                                          std::vector<Welford>(deviations.size()));
  std::vector<long> suffix(m + 2, 0);
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::for_trial(seed, trial);
    std::fill(suffix.begin(), suffix.end(), 0L);
    std::vector<long> count(strategy_levels + 1, 0);
    for (long j = 0; j + 1 < n; ++j) {
      ++count[strategy_level(strategy, rng.uniform())];
    }
    for (int b = strategy_levels; b >= 0; --b) suffix[b] = suffix[b + 1] + count[b];

    auto status_at_level = [&](int level) {
      const long weakly = level == 0 ? n - 1 : suffix[std::min(level, strategy_levels + 1)];
      return ctx.stat.value(static_cast<double>(weakly) / (n - 1));
    };
    for (std::size_t ti = 0; ti < types.size(); ++ti) {
      const double q = types[ti];
      const double vv = vpow(ctx.dist.value(q));
      const int eq_level = strategy_level(strategy, q);
      const double u_eq =
          vv * status_at_level(eq_level) - cost_of(bid_of_level(eq_level));
      for (std::size_t di = 0; di < deviations.size(); ++di) {
        const double d = deviations[di];
        const double u_dev = vv * status_at_level(level_of_bid(d)) - cost_of(d);
        gains[ti][di].add(u_dev - u_eq);
      }
    }
  }
  RegretReport report{-1e300, 0.0};
  for (const auto& row : gains) {
    for (const auto& acc : row) {
      if (acc.mean > report.regret) {
        report.regret = acc.mean;
        report.stderr_ = acc.stderr_();
      }
    }
  }
  return report;
}

RegretReport verify_ranking(const SolvedMechanism& sm, long n, int deviation_grid,
                            int type_grid, long trials, std::uint64_t seed) {
  const auto& ctx = sm.mechanism().ctx;
  const double cutoff = sm.quantile_cutoff();
  const bool has_cutoff = cutoff < 1.0;
  const double b_top = sm.bid_at(0.0);
  const double theta_star = ctx.dist.value(cutoff) * ctx.interim().value(cutoff);

  std::vector<double> types;
  for (int i = 0; i < type_grid; ++i) types.push_back((i + 0.5) / type_grid);
  if (cutoff > 0.0 && cutoff < 1.0) types.push_back(cutoff);

  std::vector<double> deviations{0.0};
  if (has_cutoff) deviations.push_back(theta_star);
  for (int j = 1; j <= deviation_grid; ++j) deviations.push_back(b_top * j / deviation_grid);
  std::sort(deviations.begin(), deviations.end());
  deviations.erase(std::unique(deviations.begin(), deviations.end()), deviations.end());

  std::vector<std::vector<Welford>> gains(types.size(),
                                          std::vector<Welford>(deviations.size()));
  std::vector<double> opp(n - 1);
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::for_trial(seed, trial);
    for (auto& b : opp) b = sm.bid_at(rng.uniform());
    std::sort(opp.begin(), opp.end(), std::greater<>());

    auto utility = [&](double vv, double d) {
      if (has_cutoff && d < theta_star) return -d;
      const auto it = std::upper_bound(opp.begin(), opp.end(), d, std::greater<>());
      const long higher = it - opp.begin();  // opponents bidding strictly more
      return vv * ctx.stat.value(static_cast<double>(higher) / (n - 1)) - d;
    };
    for (std::size_t ti = 0; ti < types.size(); ++ti) {
      const double q = types[ti];
      const double vv = ctx.dist.value(q);
      const double u_eq = utility(vv, sm.bid_at(q));
      for (std::size_t di = 0; di < deviations.size(); ++di) {
        gains[ti][di].add(utility(vv, deviations[di]) - u_eq);
      }
    }
  }
  RegretReport report{-1e300, 0.0};
  for (const auto& row : gains) {
    for (const auto& acc : row) {
      if (acc.mean > report.regret) {
        report.regret = acc.mean;
        report.stderr_ = acc.stderr_();
      }
    }
  }
  return report;
}

}  // namespace

RegretReport verify_bne(const SolvedMechanism& sm, long n, int deviation_grid,
                        int type_grid, long trials, std::uint64_t seed) {
  if (deviation_grid < 3 || type_grid < 3) {
    throw DomainError("verify_bne: grids >= 3 required");
  }
  if (sm.is_absolute()) {
    return verify_absolute(sm, sm.equilibrium().kappas.values(), n, deviation_grid,
                           type_grid, trials, seed);
  }
  return verify_ranking(sm, n, deviation_grid, type_grid, trials, seed);
}

RegretReport verify_bne_played(const SolvedMechanism& sm,
                               const mechanisms::QuantileThresholds& played, long n,
                               int deviation_grid, int type_grid, long trials,
                               std::uint64_t seed) {
  if (!sm.is_absolute()) {
    throw DomainError("verify_bne_played: absolute mechanisms only");
  }
  if (played.size() > sm.equilibrium().thetas.size()) {
    throw DomainError("verify_bne_played: played profile longer than threshold vector");
  }
  return verify_absolute(sm, played.values(), n, deviation_grid, type_grid, trials, seed);
}

std::vector<bool> expost_regret_flags(const SolvedMechanism& sm, const Population& pop,
                                      double epsilon, std::uint64_t tie_seed) {
  if (!(epsilon > 0.0)) throw DomainError("expost_regret: epsilon > 0 required");
  const auto& ctx = sm.mechanism().ctx;
  const double alpha = ctx.cost_exponent;
  auto cost_of = [&](double b) { return alpha == 1.0 ? b : std::pow(b, alpha); };
  auto vpow = [&](double v) { return alpha == 1.0 ? v : std::pow(v, alpha); };
  const long n = pop.n();
  const ExPostOutcome out = sm.play(pop, tie_seed);
  std::vector<bool> flags(n, false);

  if (sm.is_absolute()) {
    const auto& eq = sm.equilibrium();
    const int p = eq.realized_levels;
    const int m = static_cast<int>(eq.thetas.size());
    std::vector<long> count(p + 1, 0);
    for (long i = 0; i < n; ++i) ++count[out.badges[i]];
    // suffix[b] over all m+1 levels; nobody occupies levels above p
    std::vector<long> suffix(m + 2, 0);
    for (int b = p; b >= 0; --b) suffix[b] = suffix[b + 1] + count[b];

    for (long i = 0; i < n; ++i) {
      const double vv = vpow(ctx.dist.value(pop.quantiles[i]));
      const double u_now = vv * out.statuses[i] - cost_of(out.bids[i]);
      double best_gain = 0.0;
      for (int s = 0; s <= m; ++s) {
        if (s == out.badges[i]) continue;
        const long weakly = suffix[s] - (out.badges[i] >= s ? 1 : 0);
        const double t_new = static_cast<double>(weakly) / (n - 1);
        const double u_new =
            vv * ctx.stat.value(t_new) - cost_of(s == 0 ? 0.0 : eq.thetas[s - 1]);
        best_gain = std::max(best_gain, u_new - u_now);
      }
      flags[i] = best_gain > epsilon;
    }
    return flags;
  }

  // Ranking mechanisms: candidate deviations are "sit just above opponent j"
  // (infimum cost = opponent j's bid) plus dropping to zero.
  const double cutoff = sm.quantile_cutoff();
  const bool has_cutoff = cutoff < 1.0;
  const double theta_star = cutoff > 0.0
                                ? ctx.dist.value(cutoff) * ctx.interim().value(cutoff)
                                : 0.0;
  for (long i = 0; i < n; ++i) {
    std::vector<double> opp;
    opp.reserve(n - 1);
    for (long j = 0; j < n; ++j) {
      if (j != i) opp.push_back(out.bids[j]);
    }
    std::sort(opp.begin(), opp.end(), std::greater<>());
    const double v = ctx.dist.value(pop.quantiles[i]);
    const double u_now = v * out.statuses[i] - out.bids[i];
    double best_gain = 0.0 - u_now;  // drop to zero bid, zero status
    if (!has_cutoff) {
      // even a zero bid is ranked; status = S of the fraction bidding more
      const long higher = static_cast<long>(
          std::upper_bound(opp.begin(), opp.end(), 0.0, std::greater<>()) - opp.begin());
      best_gain = v * ctx.stat.value(static_cast<double>(higher) / (n - 1)) - u_now;
    }
    for (long k = 0; k < static_cast<long>(opp.size()); ++k) {
      double bid_needed = opp[k];
      if (has_cutoff) bid_needed = std::max(bid_needed, theta_star);
      const long higher = static_cast<long>(
          std::upper_bound(opp.begin(), opp.end(), bid_needed, std::greater<>()) -
          opp.begin());
      const double u_new =
          v * ctx.stat.value(static_cast<double>(higher) / (n - 1)) - bid_needed;
      best_gain = std::max(best_gain, u_new - u_now);
    }
    flags[i] = best_gain > epsilon;
  }
  return flags;
}

double expost_regret_frequency(const SolvedMechanism& sm, long n, long trials,
                               double epsilon, std::uint64_t seed) {
  long flagged = 0;
  for (long t = 0; t < trials; ++t) {
    Rng r = Rng::for_trial(seed, t);
    const Population pop = sample_population(n, r.next());
    const auto flags = expost_regret_flags(sm, pop, epsilon, r.next());
    if (std::any_of(flags.begin(), flags.end(), [](bool f) { return f; })) ++flagged;
  }
  return static_cast<double>(flagged) / trials;
}

namespace {

double partition_value(const std::vector<double>& virtuals,
                       const status::StatusFunction& stat,
                       const std::vector<unsigned>& classes, long n) {
  const long denom = std::max<long>(n - 1, 1);
  double value = 0.0;
  long better = 0;
  for (unsigned mask : classes) {
    const int size = __builtin_popcount(mask);
    const double t = static_cast<double>(better + size - 1) / denom;
    const double s = stat.value(t);
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) value += virtuals[i] * s;
    }
    better += size;
  }
  return value;
}

void enumerate_partitions(unsigned remaining, std::vector<unsigned>& classes,
                          const std::vector<double>& virtuals,
                          const status::StatusFunction& stat, long n, double& best,
                          std::vector<unsigned>& best_classes) {
  if (remaining == 0) {
    const double v = partition_value(virtuals, stat, classes, n);
    if (v > best) {
      best = v;
      best_classes = classes;
    }
    return;
  }
  // Iterate nonempty submasks of `remaining` as the next (best) class.
  for (unsigned sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
    classes.push_back(sub);
    enumerate_partitions(remaining & ~sub, classes, virtuals, stat, n, best, best_classes);
    classes.pop_back();
  }
}

}  // namespace

VirtualSurplusAssignment brute_force_virtual_surplus(
    const std::vector<double>& quantiles, const abilities::AbilityDistribution& dist,
    const status::StatusFunction& stat) {
  const long n = static_cast<long>(quantiles.size());
  if (n < 1) throw DomainError("brute_force_virtual_surplus: empty profile");
  if (n > 6) throw TooLarge("brute_force_virtual_surplus: at most 6 players");

  std::vector<double> virtuals(n);
  for (long i = 0; i < n; ++i) virtuals[i] = dist.virtual_value(quantiles[i]);

  double best = -1e300;
  std::vector<unsigned> classes, best_classes;
  enumerate_partitions((1u << n) - 1, classes, virtuals, stat, n, best, best_classes);

  VirtualSurplusAssignment out;
  out.value = best;
  out.badges.assign(n, 0);
  int badge = static_cast<int>(n);
  for (unsigned mask : best_classes) {
    for (long i = 0; i < n; ++i) {
      if (mask & (1u << i)) out.badges[i] = badge;
    }
    --badge;
  }
  return out;
}

double reference_surplus_value(const std::vector<double>& quantiles,
                               const abilities::AbilityDistribution& dist,
                               const status::StatusFunction& stat) {
  const long n = static_cast<long>(quantiles.size());
  const long denom = std::max<long>(n - 1, 1);
  std::vector<double> sorted = quantiles;
  std::sort(sorted.begin(), sorted.end());
  double value = 0.0;
  long rank = 0;
  long pooled = 0;
  for (double q : sorted) {
    if (dist.virtual_value(q) >= 0.0) ++pooled;
  }
  const long k = pooled;  // players with non-negative virtual value
  for (long i = 0; i < n; ++i) {
    const double rv = dist.virtual_value(sorted[i]);
    if (i < k) {
      value += rv * stat.value(static_cast<double>(rank) / denom);
      ++rank;
    } else {
      value += rv * stat.value(1.0);  // pooled bottom badge
    }
  }
  return value;
}

ResidualReport virtual_surplus_identity(const SolvedMechanism& sm, long n, long trials,
                                        std::uint64_t seed) {
  if (trials < 2) throw DomainError("virtual_surplus_identity: trials >= 2 required");
  const auto& ctx = sm.mechanism().ctx;
  const double alpha = ctx.cost_exponent;
  Welford bids, surplus, diff;
  for (long t = 0; t < trials; ++t) {
    Rng r = Rng::for_trial(seed, t);
    const Population pop = sample_population(n, r.next());
    const ExPostOutcome out = sm.play(pop, r.next());
    double vs = 0.0;
    double paid = 0.0;  // the identity lives in translated (b^alpha) units
    for (long i = 0; i < n; ++i) {
      vs += ctx.dist.virtual_value(pop.quantiles[i]) * out.statuses[i];
      paid += alpha == 1.0 ? out.bids[i] : std::pow(out.bids[i], alpha);
    }
    bids.add(paid / n);
    surplus.add(vs / n);
    diff.add((paid - vs) / n);
  }
  ResidualReport report;
  report.mean_bids = bids.mean;
  report.mean_surplus = surplus.mean;
  report.residual = bids.mean == 0.0 ? 0.0 : std::abs(diff.mean) / std::abs(bids.mean);
  const double se = diff.stderr_();
  report.z = se > 0.0 ? std::abs(diff.mean) / se : 0.0;
  return report;
}

SimulationReport simulate(const SolvedMechanism& sm, const SimulationParams& params) {
  SimulationReport report;
  const EstimateReport est =
      estimate_contribution(sm, params.n, params.trials, params.seed);
  report.mean_contribution = est.mean;
  report.stderr_ = est.stderr_;
  report.trials = est.trials;

  const RegretReport regret = verify_bne(sm, params.n, params.deviation_grid,
                                         params.type_grid, params.regret_trials,
                                         params.seed + 1);
  report.interim_regret = regret.regret;
  report.interim_regret_stderr = regret.stderr_;

  report.expost_regret_freq = expost_regret_frequency(sm, params.n, params.expost_trials,
                                                      params.epsilon, params.seed + 2);

  const ResidualReport vs =
      virtual_surplus_identity(sm, params.n, params.trials, params.seed + 3);
  report.vs_residual = vs.residual;
  report.vs_z = vs.z;
  return report;
}

}  // namespace badgeforge::mc
