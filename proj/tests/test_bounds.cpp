#include <doctest.h>

#include <cmath>
#include <random>

#include "clockback/bounds.hpp"
#include "clockback/error.hpp"

using namespace clockback;

namespace {

MeasurementScenario scenario(double k, double lambda, double width, double Delta, double j = 1.0,
                             double mass = 1.0) {
  MeasurementScenario s;
  s.clock = ClockSpec(mass, k, 1.0);
  s.barrier.lambda = lambda;
  s.barrier.width = width;
  s.barrier.pointer_coordinate = 1.0;
  s.barrier.eigenvalue = j;
  s.barrier.mass = mass;
  s.pointer.resolution = Delta;
  return s;
}

}  // namespace

TEST_CASE("accuracy bound arithmetic") {
  CHECK(accuracy_bound(101.0, 1.0, 1.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(accuracy_bound(2.0, 1.0, 1.0) == 1.0);
  CHECK(accuracy_bound(2.0, 0.0, 1e300) < 1e-299);
  CHECK_THROWS_AS(accuracy_bound(1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(accuracy_bound(2.0, 1.0, 0.0), Error);
}

TEST_CASE("pointer spread estimate") {
  auto s = scenario(100.0, 1.0, 1.0, 1.0);
  s.clock = ClockSpec(1.0, 100.0, 1e9);
  s.delta_J = 0.5;
  const auto ideal = pointer_spread_estimate(s);
  CHECK(ideal.total == doctest::Approx(1.0 / 100.0 * 0.5).epsilon(1e-8));
  // J/dJ = 10 and dP/<P> = 0.01 gives a factor 1.1.
  s.clock = ClockSpec(1.0, 50.0, 1.0);
  s.mean_J = 10.0;
  s.delta_J = 1.0;
  CHECK(pointer_spread_estimate(s).correction_factor == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("minimum coupling spread") {
  auto s = scenario(1.0, 1.0, 1.0, 1.0);
  s.delta_J = 0.1;
  CHECK(min_coupling_spread(s) == doctest::Approx(10.0).epsilon(1e-15));
  s.delta_J = 0.2;
  CHECK(min_coupling_spread(s) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("figure parameter sets are classified") {
  // alpha = lambda j M / k = 2 with Delta = 10.
  const auto weak = regime_classify(scenario(0.5, 1.0, 10.0, 10.0), 0.5);
  CHECK(weak.regime == Regime::kWeak);
  CHECK(weak.figures.alpha_over_delta == doctest::Approx(0.2));
  // alpha = 30 with Delta = 5.
  const auto strong = regime_classify(scenario(0.5, 15.0, 10.0, 5.0), 0.5);
  CHECK(strong.regime == Regime::kStrongBackreaction);
  CHECK(regime_name(strong.regime) == "STRONG_BACKREACTION");
}

TEST_CASE("impulsive overrides everything") {
  const auto r = regime_classify(scenario(1.0, 1e-6, 0.01, 1.0, 1.0), 1.0);
  CHECK(r.figures.q_width == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(r.regime == Regime::kImpulsive);
}

TEST_CASE("classification is scale invariant and total") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 300; ++i) {
    auto s = scenario(u(rng), u(rng), u(rng), u(rng));
    s.delta_J = u(rng);
    s.omega = 0.01 * u(rng);
    const double k = s.clock.mean_momentum();
    const auto r = regime_classify(s, k);
    CHECK(std::isfinite(r.figures.q_width));
    CHECK(std::isfinite(r.figures.alpha_over_delta));
    CHECK(std::isfinite(r.figures.energy_time));
    CHECK(std::isfinite(r.figures.omega_time));
    // Scaling eigenvalue and the coupling of the pointer together leaves alpha / Delta.
    auto t = s;
    t.barrier.eigenvalue *= 2.0;
    t.pointer.resolution *= 2.0;
    CHECK(regime_classify(t, k).figures.alpha_over_delta ==
          doctest::Approx(r.figures.alpha_over_delta).epsilon(1e-14));
  }
}

TEST_CASE("valid measurement needs the bound") {
  // alpha / Delta = 0.3 sits between the weak and strong cuts.
  auto s = scenario(10.0, 3.0, 10.0, 1.0);
  s.delta_J = 1.0;
  s.mean_J = 1.0;
  auto r = regime_classify(s, 10.0);
  CHECK(r.bound_satisfied);
  CHECK(r.regime == Regime::kValidMeasurement);
  s.omega = 10.0;
  r = regime_classify(s, 10.0);
  CHECK_FALSE(r.bound_satisfied);
  CHECK(r.regime == Regime::kStrongBackreaction);
}

TEST_CASE("ground-state clock is rejected") {
  auto s = scenario(1.0, 1.0, 1.0, 1.0);
  s.ground_energy = 10.0;
  try {
    regime_classify(s, 1.0);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDomain);
  }
}
