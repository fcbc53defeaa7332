#include <doctest.h>

#include <cmath>
#include <random>

#include "clockback/clock.hpp"
#include "clockback/error.hpp"

using namespace clockback;

TEST_CASE("clock spec validation") {
  CHECK_THROWS_AS(ClockSpec(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(ClockSpec(1.0, -1.0, 1.0), Error);
  CHECK_THROWS_AS(ClockSpec(1.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(ClockSpec(NAN, 1.0, 1.0), Error);
  const ClockSpec c(2.0, 3.0, 0.25);
  CHECK(c.momentum_spread() == 2.0);
  CHECK(c.velocity() == 1.5);
}

TEST_CASE("time uncertainty") {
  const ClockSpec c(1.0, 10.0, 1.0);
  CHECK(time_uncertainty(c, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(time_uncertainty(c, 1.0) == doctest::Approx(std::sqrt(2.0) / 10.0).epsilon(1e-15));
  // Asymptotic slope 1 / (<P> dX).
  const double tau = 1e8;
  CHECK(time_uncertainty(c, tau) / tau == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(time_uncertainty(c, -1.0) == time_uncertainty(c, 1.0));
}

TEST_CASE("usable time") {
  CHECK(usable_time(ClockSpec(1.0, 1.0, 1.0)) == 1.0);
  CHECK(usable_time(ClockSpec(2.0, 1.0, 3.0)) == 18.0);
  CHECK(usable_time(ClockSpec(1.5, 1.0, 1.4)) * 4.0 ==
        doctest::Approx(usable_time(ClockSpec(1.5, 1.0, 2.8))).epsilon(1e-15));
}

TEST_CASE("quality ratio") {
  CHECK(quality_ratio(ClockSpec(1.0, 10.0, 1.0)) == doctest::Approx(10.0).epsilon(1e-15));
  // <P> = 100 dP: ratio within a factor 2 of E / dE.
  const ClockSpec good(1.0, 50.0, 1.0);
  const double er = good.mean_energy() / good.energy_spread();
  const double qr = quality_ratio(good);
  CHECK(qr / er <= 2.0);
  CHECK(er / qr <= 2.0);
  // dP = <P>: ratio dX <P> = 1/2, not a good clock.
  const ClockSpec bad(1.0, 0.5, 1.0);
  CHECK(quality_ratio(bad) == doctest::Approx(0.5));
  CHECK_FALSE(clock_quality(bad).good_clock);
  CHECK(clock_quality(good).good_clock);
}

TEST_CASE("commutator deviation") {
  CHECK(commutator_deviation(ClockSpec(1.0, 10.0, 1.0)) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(commutator_deviation(ClockSpec(1.0, 10.0, 1e9)) < 1e-9);
  CHECK(commutator_expectation(ClockSpec(3.0, 7.0, 0.2)) == 1.0);
}

TEST_CASE("clock quality scaling properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double m = u(rng), p = u(rng), dx = u(rng);
    const ClockSpec c(m, p, dx);
    const ClockSpec wide(m, p, 2.0 * dx);
    CHECK(usable_time(wide) == doctest::Approx(4.0 * usable_time(c)).epsilon(1e-14));
    CHECK(time_uncertainty(c, 0.0) == doctest::Approx(dx * m / p).epsilon(1e-14));
    // dtau grows with |tau|.
    CHECK(time_uncertainty(c, 2.0) >= time_uncertainty(c, 1.0));
    const auto q = clock_quality(c);
    CHECK(q.quality_ratio == doctest::Approx(q.usable_time / q.dtau0).epsilon(1e-14));
    CHECK(c.energy_spread_exact() >= c.energy_spread());
  }
}
