#include "clockback/bounds.hpp"

#include <cmath>
#include <limits>

#include "clockback/error.hpp"

namespace clockback {

double MeasurementScenario::coupling_density() const {
  if (barrier.is_delta()) return std::numeric_limits<double>::infinity();
  return barrier.lambda / barrier.width;
}

void MeasurementScenario::validate() const {
  barrier.validate();
  pointer.validate();
  require(std::isfinite(mean_J), "mean_J must be finite");
  require(std::isfinite(delta_J) && delta_J > 0.0, "delta_J must be positive");
  require(std::isfinite(omega) && omega >= 0.0, "omega must be >= 0");
  require(std::isfinite(ground_energy), "ground_energy must be finite");
  require(clock_energy() > ground_energy, "clock at ground state", ErrorCode::kDomain);
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::kWeak:
      return "WEAK";
    case Regime::kValidMeasurement:
      return "VALID_MEASUREMENT";
    case Regime::kStrongBackreaction:
      return "STRONG_BACKREACTION";
    case Regime::kImpulsive:
      return "IMPULSIVE";
  }
  return "UNKNOWN";
}

double accuracy_bound(double clock_energy, double ground_energy, double duration) {
  require(clock_energy > ground_energy, "clock at ground state", ErrorCode::kDomain);
  require(duration > 0.0, "measurement duration must be positive");
  return 1.0 / ((clock_energy - ground_energy) * duration);
}

PointerSpread pointer_spread_estimate(const MeasurementScenario& s) {
  PointerSpread p;
  const double lever = s.barrier.lambda * s.clock.mass() / s.clock.mean_momentum();
  p.intrinsic = lever * s.delta_J;
  p.correction_factor = 1.0 + (s.mean_J / s.delta_J) * commutator_deviation(s.clock);
  p.clock_term = p.intrinsic * (p.correction_factor - 1.0);
  p.total = p.intrinsic * p.correction_factor;
  return p;
}

double min_coupling_spread(const MeasurementScenario& s) {
  return s.clock.mean_momentum() / (s.barrier.lambda * s.clock.mass() * s.delta_J);
}

double relative_accuracy_requirement(const MeasurementScenario& s) {
  const double duration = s.clock.mass() * s.barrier.width / s.clock.mean_momentum();
  return accuracy_bound(s.clock_energy(), s.ground_energy, duration);
}

RegimeReport regime_classify(const MeasurementScenario& s, double k,
                             const RegimeThresholds& th) {
  s.validate();
  BarrierSpec b = s.barrier;
  b.mass = s.clock.mass();
  b.pointer_coordinate = 1.0 / s.pointer.resolution;

  RegimeReport r;
  const Complex q = inside_momentum(k, b);
  const double q_abs = std::abs(q);
  r.figures.q_width = q_abs * b.width;
  r.figures.alpha_over_delta =
      std::abs(alpha(k, b.lambda, b.eigenvalue, b.mass)) / s.pointer.resolution;
  r.duration = b.is_delta() ? 0.0 : b.mass * b.width / q_abs;
  r.figures.energy_time = (s.clock_energy() - s.ground_energy) * r.duration;
  r.figures.omega_time = s.omega * r.duration;

  const double relative_spread = s.delta_J / std::abs(s.mean_J);
  r.bound_satisfied = relative_spread * r.figures.energy_time >= th.bound_factor &&
                      r.figures.omega_time <= th.max_omega_time;

  if (r.figures.q_width < th.impulsive_q_width) {
    r.regime = Regime::kImpulsive;
  } else if (r.figures.alpha_over_delta <= th.weak_alpha_over_delta) {
    r.regime = Regime::kWeak;
  } else if (r.figures.alpha_over_delta > th.strong_alpha_over_delta) {
    r.regime = Regime::kStrongBackreaction;
  } else {
    r.regime = r.bound_satisfied ? Regime::kValidMeasurement : Regime::kStrongBackreaction;
  }
  return r;
}

}  // namespace clockback
