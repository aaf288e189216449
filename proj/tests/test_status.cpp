#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "badgeforge/rng.hpp"
#include "badgeforge/status.hpp"

using namespace badgeforge;
using status::InterimStatus;
using status::MarketSize;
using status::Shape;
using status::StatusFunction;

TEST_CASE("status values") {
  const auto lin = StatusFunction::linear();
  CHECK(lin.value(0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lin.value(1.0) == 0.0);
  CHECK(lin.shape() == Shape::linear);

  const auto cr = StatusFunction::convex_reciprocal(20);
  CHECK(cr.value(0.0) == doctest::Approx(19.0).epsilon(1e-15));
  CHECK(cr.value(0.5) == doctest::Approx(19.0 / 21.0).epsilon(1e-15));
  CHECK(cr.value(1.0) == doctest::Approx(0.0).scale(1e-15));
  CHECK(cr.shape() == Shape::convex);

  const auto cp = StatusFunction::concave_power(0.5);
  CHECK(cp.value(0.75) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cp.shape() == Shape::concave);

  CHECK_THROWS_AS(lin.value(-0.01), DomainError);
  CHECK_THROWS_AS(StatusFunction::concave_power(1.5), DomainError);
  CHECK_THROWS_AS(StatusFunction::convex_reciprocal(1), DomainError);
}

TEST_CASE("shape scan classifies customs") {
  CHECK(status::scan_shape([](double t) { return 1.0 - t; }) == Shape::linear);
  CHECK(status::scan_shape([](double t) { return (1.0 - t) * (1.0 - t); }) ==
        Shape::convex);
  CHECK(status::scan_shape([](double t) { return std::sqrt(1.0 - t); }) ==
        Shape::concave);
  const auto mixed = StatusFunction::custom(
      [](double t) { return 1.0 - t + 0.3 * std::sin(6.0 * t); }, Shape::unknown);
  CHECK(mixed.shape() == Shape::unknown);
}

TEST_CASE("interim status: linear is exact, convex matches the closed form") {
  const InterimStatus lin(StatusFunction::linear(), MarketSize::finite(37));
  CHECK(lin.value(0.3) == doctest::Approx(0.7).epsilon(1e-12));

  const long n = 24;
  const InterimStatus cr(StatusFunction::convex_reciprocal(n), MarketSize::finite(n));
  for (double q = 0.05; q < 1.0; q += 0.13) {
    const double closed = (1.0 - std::pow(1.0 - q, static_cast<double>(n))) / q - 1.0;
    CHECK(cr.value(q) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(cr.value(1.0) == doctest::Approx(0.0).scale(1e-12));

  const InterimStatus large(StatusFunction::concave_power(0.5), MarketSize::large());
  CHECK(large.value(0.36) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("interim status endpoints and inversion round trip") {
  for (const auto& s : {StatusFunction::linear(), StatusFunction::concave_power(0.5),
                        StatusFunction::convex_reciprocal(20)}) {
    CAPTURE(s.name());
    for (const auto& m : {MarketSize::finite(20), MarketSize::large()}) {
      const InterimStatus is(s, m);
      CHECK(is.value(0.0) == doctest::Approx(s.top()).epsilon(1e-12));
      CHECK(is.value(1.0) == doctest::Approx(0.0).scale(1e-12));
      CHECK(is.inverse(0.0) == 1.0);
      CHECK(is.inverse(s.top()) == 0.0);
      for (double frac = 0.1; frac < 1.0; frac += 0.2) {
        const double target = frac * s.top();
        CHECK(is.value(is.inverse(target)) == doctest::Approx(target).epsilon(1e-8));
      }
      CHECK_THROWS_AS(is.inverse(s.top() * 1.01), OutOfRange);
      CHECK_THROWS_AS(is.inverse(-0.01), OutOfRange);
    }
  }
}

TEST_CASE("interim status inverse: convex reciprocal half-top level") {
  // (1 - (1-q)^20)/q - 1 = 9.5; frozen from an independent bisection.
  const InterimStatus is(StatusFunction::convex_reciprocal(20), MarketSize::finite(20));
  CHECK(is.inverse(9.5) == doctest::Approx(0.07536887104782196).epsilon(1e-8));
  const InterimStatus lin(StatusFunction::linear(), MarketSize::finite(50));
  CHECK(lin.inverse(0.5) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Bernstein transform preserves shape") {
  for (long n : {5L, 50L, 500L}) {
    for (const auto& s :
         {StatusFunction::concave_power(0.5), StatusFunction::convex_reciprocal(30)}) {
      CAPTURE(n);
      CAPTURE(s.name());
      const InterimStatus is(s, MarketSize::finite(n));
      const int grid = 200;
      const double sign = s.shape() == Shape::convex ? 1.0 : -1.0;
      for (int i = 0; i + 2 <= grid; ++i) {
        const double h = 1.0 / grid;
        const double d2 =
            is.value((i + 2) * h) - 2.0 * is.value((i + 1) * h) + is.value(i * h);
        CHECK(sign * d2 >= -1e-10);
      }
    }
  }
}

TEST_CASE("Bernstein approximants converge uniformly") {
  for (const auto& s : {StatusFunction::linear(), StatusFunction::concave_power(0.5),
                        StatusFunction::convex_reciprocal(12)}) {
    CAPTURE(s.name());
    double prev_err = 1e300;
    for (long n : {10L, 100L, 1000L, 10000L}) {
      const InterimStatus is(s, MarketSize::finite(n));
      double err = 0.0;
      for (int i = 0; i <= 100; ++i) {
        const double q = i / 100.0;
        err = std::max(err, std::abs(is.value(q) - s.value(q)));
      }
      // 1e-9 slack: for linear status the error is pure rounding noise.
      CHECK(err <= prev_err + 1e-9);
      prev_err = err;
    }
  }
}

TEST_CASE("beta-generalized single-badge interim status") {
  using status::BetaStatus;
  using status::TieSide;
  CHECK(status::beta_interim_single({1.0}, 0.5, TieSide::earned) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(status::beta_interim_single({0.0}, 0.3, TieSide::earned) == 1.0);
  CHECK(status::beta_interim_single({0.5}, 0.5, TieSide::earned) ==
        doctest::Approx(0.75).epsilon(1e-15));

  // beta = 1 earned side equals 1 - kappa exactly
  for (double k = 0.0; k <= 1.0; k += 0.1) {
    CHECK(status::beta_interim_single({1.0}, k, TieSide::earned) == 1.0 - k);
  }

  // Monte Carlo oracle for the random-winner tie resolution: each of the
  // kappa-mass co-earners beats you independently with probability 1/2.
  mc::Rng rng(2024);
  const double kappa = 0.5;
  const long n = 10000;
  double acc = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    long above = 0;
    long earners = 0;
    for (long i = 0; i + 1 < n; ++i) {
      if (rng.uniform() <= kappa) {
        ++earners;
        if (rng.uniform() < 0.5) ++above;
      }
    }
    (void)earners;
    acc += 1.0 - static_cast<double>(above) / (n - 1);
  }
  const double mc_estimate = acc / trials;
  CHECK(status::beta_interim_single({0.5}, kappa, TieSide::earned) ==
        doctest::Approx(mc_estimate).epsilon(2e-3));
}

TEST_CASE("beta status recovers the three appendix variants") {
  const status::BetaStatus base{1.0};
  const status::BetaStatus half{0.5};
  const status::BetaStatus zero{0.0};
  const double te = 0.2, tg = 0.3;
  CHECK(base.value(te, tg) == doctest::Approx(1.0 - te - tg));
  CHECK(half.value(te, tg) == doctest::Approx(1.0 - tg - te / 2.0));
  CHECK(zero.value(te, tg) == doctest::Approx(1.0 - tg));
}
