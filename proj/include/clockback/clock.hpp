#pragma once

namespace clockback {

/// Free-particle clock prepared in a minimal-uncertainty Gaussian state
/// (dX * dP = 1/2, hbar = 1). Reading the clock means tau = X / (<P>/M).
class ClockSpec {
 public:
  ClockSpec(double mass, double mean_momentum, double position_spread);

  double mass() const { return mass_; }
  double mean_momentum() const { return mean_momentum_; }
  double position_spread() const { return position_spread_; }

  double momentum_spread() const { return 0.5 / position_spread_; }
  double velocity() const { return mean_momentum_ / mass_; }

  /// <P^2>/2M for the Gaussian state.
  double mean_energy() const;
  /// Leading-order spread <P> dP / M.
  double energy_spread() const;
  /// Exact spread sqrt(Var(P^2))/2M of the Gaussian momentum distribution.
  double energy_spread_exact() const;
  /// Kinetic energy of the mean momentum, <P>^2 / 2M.
  double kinetic_energy() const;

 private:
  double mass_;
  double mean_momentum_;
  double position_spread_;
};

struct ClockQuality {
  double dtau0 = 0.0;
  double usable_time = 0.0;
  double quality_ratio = 0.0;
  double commutator_deviation = 0.0;
  double energy_ratio = 0.0;  // mean_energy / energy_spread
  bool good_clock = false;
};

/// Position spread of the freely evolving packet at laboratory time t.
double position_spread_at(const ClockSpec& clock, double t);

/// Deviation of the clock reading from laboratory time after tau has elapsed.
double time_uncertainty(const ClockSpec& clock, double tau);

/// Interval over which the reading stays within its initial accuracy, M dX^2.
double usable_time(const ClockSpec& clock);

/// usable_time / time_uncertainty(clock, 0).
double quality_ratio(const ClockSpec& clock);

/// dP/<P>: relative deviation of [tau, H_C] from i on the clock state.
double commutator_deviation(const ClockSpec& clock);

/// Expectation of [tau, H_C] / i on the clock state, i.e. <P>/<P>.
double commutator_expectation(const ClockSpec& clock);

/// All quality figures at once. A clock counts as good when the quality
/// ratio is at least 10 and the commutator deviation at most 0.1.
ClockQuality clock_quality(const ClockSpec& clock);

}  // namespace clockback
