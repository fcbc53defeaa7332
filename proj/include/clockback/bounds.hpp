#pragma once

#include <string_view>

#include "clockback/clock.hpp"
#include "clockback/pointer.hpp"
#include "clockback/scattering.hpp"

namespace clockback {

/// A complete measurement: clock, interaction, pointer and the observable's
/// mean, spread and characteristic frequency. hbar = 1 throughout.
struct MeasurementScenario {
  ClockSpec clock{1.0, 1.0, 1.0};
  BarrierSpec barrier;
  PointerSpec pointer;
  double mean_J = 1.0;
  double delta_J = 1.0;
  double omega = 0.0;
  double ground_energy = 0.0;

  /// E_C = <P>^2 / 2M.
  double clock_energy() const { return clock.kinetic_energy(); }
  /// g0 = lambda / X0; infinite in the delta limit.
  double coupling_density() const;
  void validate() const;
};

enum class Regime { kWeak, kValidMeasurement, kStrongBackreaction, kImpulsive };

std::string_view regime_name(Regime r);

struct FiguresOfMerit {
  double q_width = 0.0;           // |q| X0
  double alpha_over_delta = 0.0;  // |alpha| / Delta at Q = 1/Delta
  double energy_time = 0.0;       // (E_C - E0) * deltaT
  double omega_time = 0.0;        // omega * deltaT
};

struct RegimeReport {
  Regime regime = Regime::kWeak;
  FiguresOfMerit figures;
  double duration = 0.0;          // deltaT = M X0 / |q|
  bool bound_satisfied = false;
};

/// Minimal relative accuracy 1 / ((E_C - E0) deltaT). Throws kDomain when
/// E_C <= E0 ("clock at ground state").
double accuracy_bound(double clock_energy, double ground_energy, double duration);

struct PointerSpread {
  double total = 0.0;
  double intrinsic = 0.0;    // g0 X0 (M/<P>) dJ
  double clock_term = 0.0;   // intrinsic * (J/dJ)(dP/<P>)
  double correction_factor = 1.0;
};

/// Spread of the read-out coordinate including the clock's time uncertainty.
PointerSpread pointer_spread_estimate(const MeasurementScenario& s);

/// Smallest pointer-coordinate spread compatible with accuracy dJ:
/// <P> / (g0 X0 M dJ), with <Q> = 0.
double min_coupling_spread(const MeasurementScenario& s);

/// Right-hand side 1/(E_C deltaT) of the relative-accuracy requirement for the
/// free traversal time deltaT = M X0 / <P>.
double relative_accuracy_requirement(const MeasurementScenario& s);

/// Classification thresholds. "<<" and ">>" in the energy/frequency
/// hierarchy become factors of 10; the pointer regimes use alpha/Delta
/// cut-offs from pointer.hpp.
struct RegimeThresholds {
  double impulsive_q_width = 1.0;
  double weak_alpha_over_delta = kWeakAlphaOverDelta;
  double strong_alpha_over_delta = kStrongAlphaOverDelta;
  double bound_factor = 10.0;
  double max_omega_time = 0.1;
};

/// Total classifier, evaluated with the barrier at the typical pointer
/// coordinate Q = 1/Delta:
///   IMPULSIVE if |q| X0 < 1; else WEAK if alpha/Delta <= weak cut;
///   else STRONG_BACKREACTION if alpha/Delta > strong cut; else
///   VALID_MEASUREMENT when (dJ/J)(E_C - E0) deltaT >= 10 and omega deltaT <= 0.1,
///   STRONG_BACKREACTION otherwise.
RegimeReport regime_classify(const MeasurementScenario& s, double k,
                             const RegimeThresholds& th = {});

}  // namespace clockback
