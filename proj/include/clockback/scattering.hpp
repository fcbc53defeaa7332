#pragma once

#include "clockback/numerics.hpp"

namespace clockback {

/// The measurement interaction g(X) J Q as seen by the clock: a rectangular
/// potential of height lambda Q j / X0 on (-X0/2, X0/2), or a delta potential
/// of strength lambda Q j when width == 0.
struct BarrierSpec {
  double lambda = 0.0;
  double width = 0.0;
  double pointer_coordinate = 0.0;
  double eigenvalue = 0.0;
  double mass = 1.0;

  bool is_delta() const { return width == 0.0; }
  double delta_strength() const { return lambda * pointer_coordinate * eigenvalue; }
  /// Potential height; only meaningful for width > 0.
  double height() const { return delta_strength() / width; }
  double right_edge() const { return 0.5 * width; }

  void validate() const;
};

struct ScatteringAmplitudes {
  double k = 0.0;
  Complex T;
  Complex R;
  Complex inside_momentum;  // q, principal branch; i|q| under the barrier

  double transmission() const { return std::norm(T); }
  double reflection() const { return std::norm(R); }
  double unitarity_defect() const { return std::abs(std::norm(T) + std::norm(R) - 1.0); }
};

/// Exact plane-wave matching at X = +-X0/2. T carries no free-propagation
/// phase, so V = 0 gives T = 1; R is referred to the barrier center.
ScatteringAmplitudes rect_barrier_amplitudes(double k, const BarrierSpec& barrier);

/// Impulsive limit T = 1/(1 + i alpha Q), R = T - 1. The barrier width is
/// ignored; only lambda Q j enters.
ScatteringAmplitudes delta_barrier_transmission(double k, const BarrierSpec& barrier);

/// Dispatches on barrier.is_delta().
ScatteringAmplitudes barrier_amplitudes(double k, const BarrierSpec& barrier);

/// alpha = lambda j M / k, the pointer shift per unit Q.
double alpha(double k, double lambda, double j, double mass);

/// Complex inside-barrier momentum q = sqrt(k^2 - 2 M V).
Complex inside_momentum(double k, const BarrierSpec& barrier);

struct InteractionTiming {
  double duration = 0.0;          // M X0 / q
  double q_width = 0.0;           // q X0, the impulsiveness figure of merit
  double energy_time = 0.0;       // (q^2 / 2M) * duration = q X0 / 2
};

/// Classical traversal time of the barrier region. Throws kDomain when the
/// clock tunnels (E <= V), since there is no classical traversal.
InteractionTiming interaction_duration(const BarrierSpec& barrier, double k);

/// Rectangular barrier with pointer coordinate and eigenvalue 1 whose height
/// is V, i.e. lambda = V * width.
BarrierSpec barrier_with_height(double height, double width, double mass);

/// Height V of a barrier of the given width with |T(k)|^2 == target, found by
/// bisection on [0, 50 E]. Requires k * width < pi so that |T|^2 falls
/// monotonically with V.
double barrier_height_for_transmission(double k, double width, double mass, double target);

}  // namespace clockback
