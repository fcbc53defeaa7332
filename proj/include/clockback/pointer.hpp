#pragma once

#include <span>
#include <vector>

#include "clockback/numerics.hpp"

namespace clockback {

/// Measuring-device pointer prepared as chi(Q) = exp(-Q^2 Delta^2 / 4).
/// Delta is the measurement resolution in the P representation.
struct PointerSpec {
  double resolution = 1.0;

  void validate() const;
  double initial_wavefunction(double Q) const;
};

struct PointerMoments {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
};

struct PointerWavefunction {
  std::vector<double> grid;         // P values, strictly increasing
  std::vector<Complex> amplitudes;  // chi(P), unnormalized
  double norm = 0.0;                // integral of |chi|^2 over the grid
  PointerMoments moments;

  /// |chi(P_i)|^2 / norm.
  std::vector<double> density() const;
};

enum class PointerMethod { kClosedForm, kQuadrature };

/// alpha/Delta at or below which the back-reaction counts as weak, and above
/// which the mean pointer shift no longer tracks alpha within 10%.
inline constexpr double kWeakAlphaOverDelta = 0.2;
inline constexpr double kStrongAlphaOverDelta = 0.4;

/// Default quadrature tolerance for the Fourier-integral route.
inline constexpr double kPointerQuadratureTol = 1e-10;

/// Exact normalization of the closed form, pi / |alpha|. It follows from
/// writing 1/(1 + i alpha Q) as a Laplace integral; calibrate_prefactor
/// recovers the same constant from the quadrature oracle.
double closed_form_prefactor(double alpha);

/// erfc((Delta^2 - 2 alpha P) / (2 alpha Delta)) exp(-P/alpha + Delta^2/(4 alpha^2)),
/// evaluated without overflow. alpha < 0 uses chi_alpha(P) = chi_{-alpha}(-P).
double closed_form_shape(double P, double alpha, double Delta);

/// Transmitted pointer amplitude chi(P) = prefactor * shape. Throws kDomain
/// for alpha == 0 (the pointer is then the free Gaussian).
Complex final_pointer_closedform(double P, double alpha, double Delta);

/// chi(P) = integral dQ exp(iQP) exp(-Q^2 Delta^2/4) / (1 + i alpha Q) over
/// |Q| <= 12/Delta by adaptive quadrature. tol is relative to |chi(P)| with an
/// absolute floor of tol * 1e-10 * sqrt(pi)/Delta.
Complex final_pointer_quadrature(double P, double alpha, double Delta,
                                 double tol = kPointerQuadratureTol);

/// Least-squares constant c minimising sum |c * shape - chi_quadrature|^2
/// over the grid.
double calibrate_prefactor(double alpha, double Delta, std::span<const double> grid,
                           double tol = kPointerQuadratureTol);

/// 4096 points spanning mean +- 10 std, located from a pilot pass; the
/// exponential side reaches at least 12 |alpha| past the mean.
std::vector<double> default_pointer_grid(double alpha, double Delta,
                                         std::size_t points = 4096);

/// Normalized pointer distribution with moments. The closed form is used
/// unless method == kQuadrature or the closed form rejects the inputs.
/// Throws kGridTooNarrow when the outer 2% of points on either side carry at
/// least 1e-3 of the probability.
PointerWavefunction pointer_distribution(double alpha, double Delta,
                                         std::span<const double> grid,
                                         PointerMethod method = PointerMethod::kClosedForm);

/// Moments of a sampled density (trapezoid rule, compensated sums).
PointerMoments distribution_moments(std::span<const double> grid,
                                    std::span<const double> density, double* norm_out = nullptr);

struct WeakShift {
  double shift = 0.0;        // alpha = lambda j M / k
  double alpha_over_delta = 0.0;
  bool weak = false;         // |alpha| / Delta <= kWeakAlphaOverDelta
};

/// Pointer shift in the weak limit. The weakness condition is reported, not
/// enforced.
WeakShift weak_limit_shift(double k, double lambda, double j, double mass, double Delta);

}  // namespace clockback
