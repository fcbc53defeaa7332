#include "clockback/scattering.hpp"

#include <cmath>
#include <numbers>

#include "clockback/error.hpp"

namespace clockback {

namespace {

void require_momentum(double k) {
  require(std::isfinite(k), "incident momentum must be finite");
  require(k != 0.0, "zero incident momentum", ErrorCode::kDomain);
  require(k > 0.0, "incident momentum must be positive");
}

Complex sinc(Complex z) {
  if (std::abs(z) < 1e-3) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

}  // namespace

void BarrierSpec::validate() const {
  require(std::isfinite(lambda) && std::isfinite(pointer_coordinate) &&
              std::isfinite(eigenvalue),
          "barrier parameters must be finite");
  require(std::isfinite(width) && width >= 0.0, "barrier width must be >= 0");
  require(std::isfinite(mass) && mass > 0.0, "barrier mass must be positive");
}

double alpha(double k, double lambda, double j, double mass) {
  require_momentum(k);
  return lambda * j * mass / k;
}

Complex inside_momentum(double k, const BarrierSpec& barrier) {
  if (barrier.is_delta()) return {k, 0.0};
  return std::sqrt(Complex{k * k - 2.0 * barrier.mass * barrier.height(), 0.0});
}

ScatteringAmplitudes rect_barrier_amplitudes(double k, const BarrierSpec& barrier) {
  require_momentum(k);
  barrier.validate();
  require(!barrier.is_delta(), "rect_barrier_amplitudes: width must be > 0");

  const Complex i{0.0, 1.0};
  const double x0 = barrier.width;
  const Complex q = inside_momentum(k, barrier);
  const Complex qx = q * x0;
  // Transfer-matrix denominator cos(qX0) - i (k^2 + q^2)/(2k) sin(qX0)/q and
  // the reflection numerator i (q^2 - k^2)/(2k) sin(qX0)/q. Under a thick
  // barrier both are rescaled by exp(-|Im qX0|) to stay finite.
  const double y = qx.imag();
  Complex cosine;
  Complex sine_over_q;
  Complex free_phase = std::exp(-i * (k * x0));
  if (y > 20.0) {
    const Complex up = std::exp(i * qx - y);
    const Complex down = std::exp(-i * qx - y);
    cosine = 0.5 * (up + down);
    sine_over_q = (up - down) / (2.0 * i * q);
    free_phase *= std::exp(-y);
  } else {
    cosine = std::cos(qx);
    sine_over_q = x0 * sinc(qx);
  }
  const Complex k2 = k * k;
  const Complex q2 = q * q;
  const Complex denom = cosine - i * (k2 + q2) / (2.0 * k) * sine_over_q;
  ScatteringAmplitudes out;
  out.k = k;
  out.inside_momentum = q;
  out.T = free_phase / denom;
  out.R = i * (q2 - k2) / (2.0 * k) * sine_over_q * std::exp(-i * (k * x0)) / denom;
  return out;
}

ScatteringAmplitudes delta_barrier_transmission(double k, const BarrierSpec& barrier) {
  require_momentum(k);
  barrier.validate();
  const double aq =
      alpha(k, barrier.lambda, barrier.eigenvalue, barrier.mass) * barrier.pointer_coordinate;
  ScatteringAmplitudes out;
  out.k = k;
  out.inside_momentum = {k, 0.0};
  out.T = 1.0 / Complex{1.0, aq};
  out.R = out.T - 1.0;
  return out;
}

ScatteringAmplitudes barrier_amplitudes(double k, const BarrierSpec& barrier) {
  return barrier.is_delta() ? delta_barrier_transmission(k, barrier)
                            : rect_barrier_amplitudes(k, barrier);
}

InteractionTiming interaction_duration(const BarrierSpec& barrier, double k) {
  require_momentum(k);
  barrier.validate();
  require(!barrier.is_delta(), "interaction_duration: width must be > 0");
  const double e_minus_v = 0.5 * k * k / barrier.mass - barrier.height();
  require(e_minus_v > 0.0, "no classical traversal", ErrorCode::kDomain);
  const double q = std::sqrt(2.0 * barrier.mass * e_minus_v);
  InteractionTiming t;
  t.duration = barrier.mass * barrier.width / q;
  t.q_width = q * barrier.width;
  t.energy_time = 0.5 * q * q / barrier.mass * t.duration;
  return t;
}

BarrierSpec barrier_with_height(double height, double width, double mass) {
  BarrierSpec b;
  b.lambda = height * width;
  b.width = width;
  b.pointer_coordinate = 1.0;
  b.eigenvalue = 1.0;
  b.mass = mass;
  b.validate();
  return b;
}

double barrier_height_for_transmission(double k, double width, double mass, double target) {
  require_momentum(k);
  require(width > 0.0 && k * width < std::numbers::pi,
          "height search needs 0 < k * width < pi");
  require(target > 0.0 && target < 1.0, "target transmission must lie in (0, 1)");
  const double energy = 0.5 * k * k / mass;
  double lo = 0.0;
  double hi = 50.0 * energy;
  auto trans = [&](double v) {
    return rect_barrier_amplitudes(k, barrier_with_height(v, width, mass)).transmission();
  };
  require(trans(hi) < target, "target transmission below the search range");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (trans(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace clockback
