#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "badgeforge/mechanisms.hpp"
#include "badgeforge/numerics.hpp"
#include "badgeforge/rng.hpp"

using namespace badgeforge;
using abilities::AbilityDistribution;
using mechanisms::ContributionThresholds;
using mechanisms::MechanismContext;
using mechanisms::QuantileThresholds;
using status::MarketSize;
using status::StatusFunction;

namespace {

MechanismContext uniform_linear(MarketSize m = MarketSize::large()) {
  return {AbilityDistribution::uniform01(), StatusFunction::linear(), m};
}

}  // namespace

TEST_CASE("threshold containers validate and canonicalize") {
  const QuantileThresholds kq({0.25, 0.5, 0.5});
  REQUIRE(kq.size() == 2);
  CHECK(kq[0] == 0.5);
  CHECK(kq[1] == 0.25);
  CHECK(QuantileThresholds{}.empty());
  CHECK_THROWS_AS(QuantileThresholds({1.5}), DomainError);
  CHECK_THROWS_AS(ContributionThresholds({0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(ContributionThresholds({-0.5}), DomainError);
}

TEST_CASE("optimal cutoff") {
  const auto uni = uniform_linear();
  const auto cut = mechanisms::optimal_cutoff(uni);
  CHECK(cut.theta_star == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(cut.kappa_star == doctest::Approx(0.5).epsilon(1e-9));

  const MechanismContext lt3{AbilityDistribution::long_tail(3.0),
                             StatusFunction::linear(), MarketSize::large()};
  const auto cut3 = mechanisms::optimal_cutoff(lt3);
  CHECK(cut3.theta_star == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(cut3.kappa_star == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(cut3.theta_star > 0.0);
}

TEST_CASE("optimal bid: linear specialization and monotonicity") {
  const auto ctx = uniform_linear();
  CHECK(mechanisms::optimal_bid(ctx, 0.5) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(mechanisms::optimal_bid(ctx, 0.0) == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(mechanisms::optimal_bid(ctx, 0.8) == 0.0);

  // Against the linear-status form v(k*)(1-k*) + int_q^{k*} v(z) dz.
  for (double q = 0.0; q <= 0.5; q += 0.1) {
    const double expected =
        0.25 + numerics::integrate([](double z) { return 1.0 - z; }, q, 0.5);
    CHECK(mechanisms::optimal_bid(ctx, q) == doctest::Approx(expected).epsilon(1e-8));
  }

  // finite n, concave status: still decreasing with b(kappa*) = theta*.
  const MechanismContext cc{AbilityDistribution::power(2.0),
                            StatusFunction::concave_power(0.5), MarketSize::finite(40)};
  const auto cut = mechanisms::optimal_cutoff(cc);
  double prev = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double b = mechanisms::optimal_bid(cc, i / 200.0);
    CHECK(b <= prev + 1e-9);
    prev = b;
  }
  CHECK(mechanisms::optimal_bid(cc, cut.kappa_star) ==
        doctest::Approx(cut.theta_star).epsilon(1e-9));
}

TEST_CASE("optimal contribution") {
  CHECK(mechanisms::optimal_contribution(uniform_linear()) ==
        doctest::Approx(5.0 / 24.0).epsilon(1e-9));

  const MechanismContext lt{AbilityDistribution::long_tail(1e4),
                            StatusFunction::linear(), MarketSize::large()};
  CHECK(std::abs(mechanisms::optimal_contribution(lt) - 1.0) < 0.05);

  // Convex example at n = 1024; the Bernstein path must reproduce the
  // closed-form integrand value (frozen from the quadrature oracle).
  const long n = 1024;
  const MechanismContext cvx{AbilityDistribution::uniform01(),
                             StatusFunction::convex_reciprocal(n), MarketSize::finite(n)};
  const double opt = mechanisms::optimal_contribution(cvx);
  CHECK(opt == doctest::Approx(5.5679797112303836).epsilon(1e-6));
  CHECK(opt >= 5.56);
}

TEST_CASE("optimal contribution cross-checks the linear closed form") {
  for (const auto& dist :
       {AbilityDistribution::uniform01(), AbilityDistribution::power(2.0),
        AbilityDistribution::long_tail(3.0)}) {
    CAPTURE(dist.name());
    const MechanismContext ctx{dist, StatusFunction::linear(), MarketSize::large()};
    const double ks = abilities::monopoly_quantile(dist);
    const double closed =
        dist.revenue(ks) * (1.0 - ks) +
        numerics::integrate([&](double q) { return dist.revenue(q); }, 0.0, ks);
    CHECK(mechanisms::optimal_contribution(ctx) ==
          doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("thresholds from quantiles") {
  const auto ctx = uniform_linear();
  const auto single = mechanisms::thresholds_from_quantiles(ctx, QuantileThresholds({0.5}));
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.25).epsilon(1e-12));

  const auto pair =
      mechanisms::thresholds_from_quantiles(ctx, QuantileThresholds({0.5, 0.25}));
  REQUIRE(pair.size() == 2);
  CHECK(pair[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(pair[1] == doctest::Approx(7.0 / 16.0).epsilon(1e-12));

  CHECK(mechanisms::thresholds_from_quantiles(ctx, QuantileThresholds{}).empty());
}

TEST_CASE("quantiles from thresholds: recursion, early stop, no participation") {
  const auto ctx = uniform_linear();

  const auto two = mechanisms::quantiles_from_thresholds(
      ctx, ContributionThresholds({0.25, 7.0 / 16.0}));
  REQUIRE(two.realized_levels == 2);
  CHECK(two.kappas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(two.kappas[1] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(two.bid(0.6) == 0.0);
  CHECK(two.bid(0.3) == doctest::Approx(0.25));
  CHECK(two.bid(0.1) == doctest::Approx(7.0 / 16.0));

  const auto none = mechanisms::quantiles_from_thresholds(ctx, ContributionThresholds({2.0}));
  CHECK(none.realized_levels == 0);
  CHECK(none.bid(0.5) == 0.0);

  const auto one = mechanisms::quantiles_from_thresholds(
      ctx, ContributionThresholds({0.25, 100.0}));
  REQUIRE(one.realized_levels == 1);
  CHECK(one.kappas[0] == doctest::Approx(0.5).epsilon(1e-9));
  // boundary inequality for the unrealized level
  CHECK(100.0 - 0.25 >= ctx.dist.v_bar() * (ctx.stat.top() - 0.5));
}

TEST_CASE("equilibrium round trip across the matrix") {
  const std::vector<AbilityDistribution> dists{
      AbilityDistribution::uniform01(), AbilityDistribution::power(2.0),
      AbilityDistribution::long_tail(3.0)};
  const std::vector<StatusFunction> stats{StatusFunction::linear(),
                                          StatusFunction::concave_power(0.5),
                                          StatusFunction::convex_reciprocal(25)};
  mc::Rng rng(99);
  for (const auto& dist : dists) {
    for (const auto& stat : stats) {
      for (const auto& market : {MarketSize::large(), MarketSize::finite(25)}) {
        const MechanismContext ctx{dist, stat, market};
        for (int rep = 0; rep < 3; ++rep) {
          const int len = 1 + static_cast<int>(rng.below(6));
          std::vector<double> ks;
          for (int i = 0; i < len; ++i) ks.push_back(0.02 + 0.96 * rng.uniform());
          const QuantileThresholds kq(ks);
          const auto thetas = mechanisms::thresholds_from_quantiles(ctx, kq);
          const auto sol = mechanisms::quantiles_from_thresholds(ctx, thetas);
          REQUIRE(sol.realized_levels == static_cast<int>(kq.size()));
          for (std::size_t t = 0; t < kq.size(); ++t) {
            CHECK(sol.kappas[t] == doctest::Approx(kq[t]).epsilon(1e-8));
          }
        }
      }
    }
  }
}

TEST_CASE("interim allocation is a non-increasing step at the interim levels") {
  const auto ctx = uniform_linear(MarketSize::finite(30));
  const auto sol = mechanisms::quantiles_from_thresholds(
      ctx, mechanisms::thresholds_from_quantiles(ctx, QuantileThresholds({0.6, 0.3, 0.1})));
  REQUIRE(sol.realized_levels == 3);
  const auto is = ctx.interim();
  double prev = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double q = i / 200.0;
    const double x = sol.interim_allocation(q);
    CHECK(x <= prev + 1e-12);
    prev = x;
  }
  // the step heights are S_n at the solved thresholds (recovered to ~1e-9)
  CHECK(sol.interim_allocation(0.05) == doctest::Approx(is.value(0.1)).epsilon(1e-8));
  CHECK(sol.interim_allocation(0.2) == doctest::Approx(is.value(0.3)).epsilon(1e-8));
  CHECK(sol.interim_allocation(0.45) == doctest::Approx(is.value(0.6)).epsilon(1e-8));
  CHECK(sol.interim_allocation(0.05) ==
        doctest::Approx(is.value(sol.kappas[2])).epsilon(1e-14));
  CHECK(sol.interim_allocation(0.8) == 0.0);
}

TEST_CASE("absolute contribution") {
  const auto ctx = uniform_linear();
  CHECK(mechanisms::absolute_contribution(ctx, QuantileThresholds({0.5})) ==
        doctest::Approx(0.125).epsilon(1e-12));
  CHECK(mechanisms::absolute_contribution(ctx, QuantileThresholds({0.5, 0.25})) ==
        doctest::Approx(11.0 / 64.0).epsilon(1e-12));
  CHECK(mechanisms::absolute_contribution(ctx, QuantileThresholds{}) == 0.0);
}

TEST_CASE("absolute contribution equals the virtual-surplus integral") {
  const std::vector<MechanismContext> ctxs{
      uniform_linear(),
      {AbilityDistribution::power(2.0), StatusFunction::concave_power(0.5),
       MarketSize::finite(20)},
      {AbilityDistribution::long_tail(3.0), StatusFunction::convex_reciprocal(20),
       MarketSize::finite(20)}};
  for (const auto& ctx : ctxs) {
    const QuantileThresholds kq({0.55, 0.3, 0.12});
    const auto is = ctx.interim();
    auto xhat = [&](double q) {
      for (std::size_t t = kq.size(); t-- > 0;) {
        if (q <= kq[t]) return is.value(kq[t]);
      }
      return 0.0;
    };
    double integral = 0.0;
    double prev = 0.0;
    // integrate R' * xhat piecewise so the step discontinuities are exact
    std::vector<double> cuts(kq.values().rbegin(), kq.values().rend());
    cuts.push_back(1.0);
    for (double hi : cuts) {
      integral += numerics::integrate(
          [&](double q) { return ctx.dist.virtual_value(q) * xhat(q); }, prev, hi);
      prev = hi;
    }
    CHECK(mechanisms::absolute_contribution(ctx, kq) ==
          doctest::Approx(integral).epsilon(1e-7));
  }
}

TEST_CASE("leaderboard contribution") {
  const auto ctx = uniform_linear();
  const double ks = 0.5;
  CHECK(mechanisms::leaderboard_contribution(ctx, ks) ==
        doctest::Approx(mechanisms::optimal_contribution(ctx)).epsilon(1e-9));

  // concave counterexample closed forms, large market
  const double alpha = 0.01;
  const MechanismContext cc{AbilityDistribution::uniform01(),
                            StatusFunction::concave_power(alpha), MarketSize::large()};
  const double full = mechanisms::leaderboard_contribution(cc);
  const double expected_full = alpha / (alpha * alpha + 3.0 * alpha + 2.0);
  CHECK(full == doctest::Approx(expected_full).epsilon(1e-8));
  CHECK(full == doctest::Approx(0.004926).epsilon(0.0).scale(1.0).epsilon(1e-4 / 0.004926));

  const double cutoff_half = mechanisms::leaderboard_contribution(cc, 0.5);
  const double expected_half = (alpha + std::pow(2.0, -alpha - 1.0)) /
                               (alpha * alpha + 3.0 * alpha + 2.0);
  CHECK(cutoff_half == doctest::Approx(expected_half).epsilon(1e-8));
  CHECK(std::abs(cutoff_half - 0.24947) < 1e-4);

  CHECK_THROWS_AS(mechanisms::leaderboard_contribution(ctx, 1.5), DomainError);
}

TEST_CASE("single-badge constructions") {
  CHECK(mechanisms::construct_median().values() == std::vector<double>{0.5});
  CHECK(mechanisms::construct_single_improved(AbilityDistribution::uniform01())[0] ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mechanisms::construct_single_improved(AbilityDistribution::long_tail(3.0))[0] ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("concave m-badge construction") {
  const auto ctx = uniform_linear();
  const auto kq = mechanisms::construct_concave_m(ctx, 4);
  REQUIRE(kq.size() == 4);
  CHECK(kq[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(kq[1] == doctest::Approx(0.375).epsilon(1e-8));
  CHECK(kq[2] == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(kq[3] == doctest::Approx(0.125).epsilon(1e-8));

  CHECK(mechanisms::construct_concave_m(ctx, 3).size() == 3);
  CHECK_THROWS_AS(mechanisms::construct_concave_m(ctx, 2), DomainError);

  const MechanismContext cvx{AbilityDistribution::uniform01(),
                             StatusFunction::convex_reciprocal(20), MarketSize::finite(20)};
  CHECK_THROWS_AS(mechanisms::construct_concave_m(cvx, 4), ShapeMismatch);

  // m-badge bound: APX >= (1 - 2/m) OPT
  for (int m : {3, 4, 8}) {
    const double apx =
        mechanisms::absolute_contribution(ctx, mechanisms::construct_concave_m(ctx, m));
    CHECK(apx >= (1.0 - 2.0 / m) * mechanisms::optimal_contribution(ctx) - 1e-9);
  }
}

TEST_CASE("convex log-H ladder") {
  const long n = 1023;
  const MechanismContext ctx{AbilityDistribution::uniform01(),
                             StatusFunction::convex_reciprocal(n), MarketSize::finite(n)};
  const auto kq = mechanisms::construct_convex_logH(ctx);
  const auto is = ctx.interim();
  const double s_top = ctx.stat.top();
  CHECK(s_top == doctest::Approx(1022.0));
  const int m = static_cast<int>(kq.size());
  CHECK(m == 10);  // ceil(log2(1022 / S_n(1/2))), S_n(1/2) just under 1
  CHECK(kq[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (int t = 2; t <= m; ++t) {
    CHECK(is.value(kq[t - 1]) ==
          doctest::Approx(s_top / std::pow(2.0, m - t + 1)).epsilon(1e-7));
  }

  CHECK_THROWS_AS(mechanisms::construct_convex_logH(uniform_linear()), ShapeMismatch);

  // 4-approximation on a small convex matrix
  for (const auto& dist :
       {AbilityDistribution::uniform01(), AbilityDistribution::long_tail(3.0)}) {
    const MechanismContext c{dist, StatusFunction::convex_reciprocal(40),
                             MarketSize::finite(40)};
    const double apx =
        mechanisms::absolute_contribution(c, mechanisms::construct_convex_logH(c));
    CHECK(apx >= mechanisms::optimal_contribution(c) / 4.0 - 1e-9);
  }
}

TEST_CASE("linear m-badge construction") {
  const auto ctx = uniform_linear();
  const auto one = mechanisms::construct_linear_m(ctx, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mechanisms::absolute_contribution(ctx, one) ==
        doctest::Approx(0.125).epsilon(1e-9));

  const auto three = mechanisms::construct_linear_m(ctx, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(three[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(three[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  const double apx3 = mechanisms::absolute_contribution(ctx, three);
  CHECK(apx3 >= 0.6 * mechanisms::optimal_contribution(ctx) - 1e-9);

  // Riemann refinement: within 1% of the optimum at m = 256.
  const double apx256 = mechanisms::absolute_contribution(
      ctx, mechanisms::construct_linear_m(ctx, 256));
  CHECK(mechanisms::optimal_contribution(ctx) / apx256 <= 1.01);

  const MechanismContext cc{AbilityDistribution::uniform01(),
                            StatusFunction::concave_power(0.5), MarketSize::large()};
  CHECK_THROWS_AS(mechanisms::construct_linear_m(cc, 4), ShapeMismatch);
}

TEST_CASE("adding a badge below the monopoly quantile never hurts") {
  const auto ctx = uniform_linear();
  CHECK(mechanisms::add_badge_delta(ctx, QuantileThresholds({0.5}), 0.25) ==
        doctest::Approx(3.0 / 64.0).epsilon(1e-12));
  CHECK(mechanisms::add_badge_delta(ctx, QuantileThresholds({0.5}), 0.5) == 0.0);
  CHECK(std::abs(mechanisms::add_badge_delta(ctx, QuantileThresholds({0.5}), 0.5 - 1e-7)) <
        1e-5);

  mc::Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> ks;
    const int len = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < len; ++i) ks.push_back(0.05 + 0.9 * rng.uniform());
    const double extra = 0.5 * rng.uniform();  // below kappa* = 1/2
    CHECK(mechanisms::add_badge_delta(ctx, QuantileThresholds(ks), extra) >= -1e-9);
  }

  // Above the monopoly quantile the delta can be negative (reported, not
  // asserted): adding 3/4 to the median badge on uniform loses revenue.
  CHECK(mechanisms::add_badge_delta(ctx, QuantileThresholds({0.5}), 0.75) < 0.0);
}

TEST_CASE("approximation ratio") {
  const auto ctx = uniform_linear();
  CHECK(mechanisms::approximation_ratio(ctx, mechanisms::construct_median()) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-9));

  const MechanismContext lt{AbilityDistribution::long_tail(1e4),
                            StatusFunction::linear(), MarketSize::large()};
  CHECK(std::abs(mechanisms::approximation_ratio(lt, mechanisms::construct_median()) -
                 4.0) < 0.1);

  // Power(64): no single badge beats a 2-approximation; the best one over a
  // grid is already >= 1.9 away from optimal.
  const MechanismContext p64{AbilityDistribution::power(64.0), StatusFunction::linear(),
                             MarketSize::large()};
  double best = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double k = i / 2000.0;
    best = std::max(best, p64.dist.revenue(k) * (1.0 - k));
  }
  CHECK(mechanisms::approximation_ratio(p64, best) >= 1.9);

  CHECK_THROWS_AS(mechanisms::approximation_ratio(ctx, 0.0), DivisionDegenerate);
}

TEST_CASE("cost exponent: translated identity and round trip") {
  for (double alpha : {1.0, 2.0, 3.0}) {
    MechanismContext ctx{AbilityDistribution::uniform01(), StatusFunction::linear(),
                         MarketSize::large(), alpha};
    const QuantileThresholds kq({0.5, 0.25});
    const auto thetas = mechanisms::thresholds_from_quantiles(ctx, kq);
    // theta_t^alpha must satisfy the base-model identity
    const auto base = mechanisms::thresholds_from_quantiles(uniform_linear(), kq);
    for (std::size_t t = 0; t < kq.size(); ++t) {
      CHECK(std::pow(thetas[t], alpha) == doctest::Approx(base[t]).epsilon(1e-10));
    }
    const auto sol = mechanisms::quantiles_from_thresholds(ctx, thetas);
    REQUIRE(sol.realized_levels == 2);
    CHECK(sol.kappas[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(sol.kappas[1] == doctest::Approx(0.25).epsilon(1e-8));
  }
  // alpha = 1 reproduces the base path bit for bit
  MechanismContext explicit_one{AbilityDistribution::uniform01(),
                                StatusFunction::linear(), MarketSize::large(), 1.0};
  const QuantileThresholds kq({0.6, 0.2});
  CHECK(mechanisms::thresholds_from_quantiles(explicit_one, kq).values() ==
        mechanisms::thresholds_from_quantiles(uniform_linear(), kq).values());
}

TEST_CASE("asymmetric populations reduce to the aggregate in the large market") {
  abilities::PopulationMix mix;
  mix.components.push_back({0.5, AbilityDistribution::uniform01()});
  mix.components.push_back({0.5, AbilityDistribution::power(2.0)});
  const auto agg = abilities::aggregate(mix);
  const MechanismContext ctx{agg, StatusFunction::linear(), MarketSize::large()};

  // Single badge at kappa: the implementing threshold is v(kappa) S(kappa) of
  // the aggregate, and the round trip through the solver recovers kappa.
  const QuantileThresholds kq({0.4});
  const auto thetas = mechanisms::thresholds_from_quantiles(ctx, kq);
  CHECK(thetas[0] == doctest::Approx(agg.value(0.4) * 0.6).epsilon(1e-9));
  const auto sol = mechanisms::quantiles_from_thresholds(ctx, thetas);
  REQUIRE(sol.realized_levels == 1);
  CHECK(sol.kappas[0] == doctest::Approx(0.4).epsilon(1e-7));

  // contribution matches the step form on the aggregate revenue curve
  CHECK(mechanisms::absolute_contribution(ctx, kq) ==
        doctest::Approx(agg.revenue(0.4) * 0.6).epsilon(1e-8));
}

TEST_CASE("mechanism factories") {
  auto ctx = uniform_linear(MarketSize::finite(100));
  const auto opt = mechanisms::Mechanism::optimal(ctx);
  CHECK(opt.kind == mechanisms::Mechanism::Kind::optimal_leaderboard_cutoff);
  const auto lb = mechanisms::Mechanism::leaderboard(ctx, 0.3);
  CHECK(lb.cutoff == 0.3);
  const auto abs = mechanisms::Mechanism::absolute_from_kappas(ctx, QuantileThresholds({0.5}));
  CHECK(abs.kappas.has_value());
}
