#include "clockback/clock.hpp"

#include <cmath>

#include "clockback/error.hpp"

namespace clockback {

ClockSpec::ClockSpec(double mass, double mean_momentum, double position_spread)
    : mass_(mass),
      mean_momentum_(mean_momentum),
      position_spread_(position_spread) {
  require(std::isfinite(mass) && mass > 0.0, "clock mass must be positive");
  require(std::isfinite(mean_momentum) && mean_momentum > 0.0,
          "clock mean momentum must be positive");
  require(std::isfinite(position_spread) && position_spread > 0.0,
          "clock position spread must be positive");
}

double ClockSpec::mean_energy() const {
  const double dp = momentum_spread();
  return (mean_momentum_ * mean_momentum_ + dp * dp) / (2.0 * mass_);
}

double ClockSpec::energy_spread() const {
  return mean_momentum_ * momentum_spread() / mass_;
}

double ClockSpec::energy_spread_exact() const {
  const double p = mean_momentum_;
  const double s2 = momentum_spread() * momentum_spread();
  return std::sqrt(4.0 * p * p * s2 + 2.0 * s2 * s2) / (2.0 * mass_);
}

double ClockSpec::kinetic_energy() const {
  return mean_momentum_ * mean_momentum_ / (2.0 * mass_);
}

double position_spread_at(const ClockSpec& clock, double t) {
  const double dx = clock.position_spread();
  const double spread_time = clock.mass() * dx * dx;
  return dx * std::hypot(1.0, t / spread_time);
}

double time_uncertainty(const ClockSpec& clock, double tau) {
  require(std::isfinite(tau), "time_uncertainty: tau must be finite");
  return position_spread_at(clock, tau) / clock.velocity();
}

double usable_time(const ClockSpec& clock) {
  return clock.mass() * clock.position_spread() * clock.position_spread();
}

double quality_ratio(const ClockSpec& clock) {
  return usable_time(clock) / time_uncertainty(clock, 0.0);
}

double commutator_deviation(const ClockSpec& clock) {
  return clock.momentum_spread() / clock.mean_momentum();
}

double commutator_expectation(const ClockSpec& clock) {
  return clock.mean_momentum() / clock.mean_momentum();
}

ClockQuality clock_quality(const ClockSpec& clock) {
  ClockQuality q;
  q.dtau0 = time_uncertainty(clock, 0.0);
  q.usable_time = usable_time(clock);
  q.quality_ratio = q.usable_time / q.dtau0;
  q.commutator_deviation = commutator_deviation(clock);
  q.energy_ratio = clock.mean_energy() / clock.energy_spread();
  q.good_clock = q.quality_ratio >= 10.0 && q.commutator_deviation <= 0.1;
  return q;
}

}  // namespace clockback
