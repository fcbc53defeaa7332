#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace clockback {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationOptions {
  // Points per pointer curve compared against the quadrature oracle.
  std::size_t pointer_points = 257;
  // Random rectangular barriers in the unitarity sweep.
  std::size_t unitarity_samples = 1000;
  bool include_propagator = true;
  unsigned long long seed = 20240531ULL;
};

/// Stationary |T|^2 targets for the propagator comparison.
inline constexpr double kPropagatorTargets[] = {0.05, 0.25, 0.5, 0.75, 0.95};

/// Cross-module oracle suite: closed-form pointer vs Fourier quadrature,
/// rectangular vs delta barrier, flux conservation, split-step propagation
/// vs stationary amplitudes, and post-selected overlaps vs their analytic
/// Gaussian form.
std::vector<CheckResult> run_validation(const ValidationOptions& opts = {});

/// Sampled transmission oracle int |phi_C(k)|^2 |T(k)|^2 dk for a Gaussian
/// momentum distribution.
double averaged_transmission(double mean_k, double sigma_k, double mass, double lambda,
                             double width, double Q, double j);

}  // namespace clockback
