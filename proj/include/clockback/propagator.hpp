#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "clockback/clock.hpp"
#include "clockback/numerics.hpp"
#include "clockback/scattering.hpp"

namespace clockback {

/// Uniform periodic grid x_i = -half_width + i * dx, dx = 2 half_width / n,
/// with n a power of two.
struct Grid {
  std::size_t n = 8192;
  double half_width = 100.0;

  double dx() const { return 2.0 * half_width / static_cast<double>(n); }
  double x(std::size_t i) const { return -half_width + static_cast<double>(i) * dx(); }
  /// Angular wavenumber of FFT bin i (standard FFT ordering).
  double k(std::size_t i) const;
  void validate() const;
};

struct Wavepacket {
  Grid grid;
  std::vector<Complex> psi;
  double mass = 1.0;

  double norm() const;
  double mean_x() const;
  double spread_x() const;
  /// Largest |psi| among the outermost 8 cells on each side, relative to max |psi|.
  double boundary_fraction() const;
};

/// Real potential sampled on a grid.
struct PotentialProfile {
  std::vector<double> values;

  double max_abs() const;
};

/// Minimal-uncertainty Gaussian centred at x0 with mean momentum k0.
Wavepacket gaussian_wavepacket(const Grid& grid, double mass, double x0, double k0,
                               double position_spread);

/// Clock wavepacket for a ClockSpec, centred at x0.
Wavepacket clock_wavepacket(const Grid& grid, const ClockSpec& clock, double x0);

PotentialProfile zero_potential(const Grid& grid);

/// Rectangular barrier of height barrier.height() on (-X0/2, X0/2); cells cut
/// by an edge are weighted by their fractional overlap.
PotentialProfile rect_potential(const Grid& grid, const BarrierSpec& barrier);

struct EvolveOptions {
  // Boundary check interval in steps; 0 checks only at the end.
  std::size_t leak_check_every = 256;
  double leak_tolerance = 1e-8;
  // Stability heuristics dt max|V| <= 0.1 and dt k_max^2 / 2M <= 0.1, with
  // k_max the largest |k| at which |psi(k)| exceeds 1e-6 of its peak.
  double stability_limit = 0.1;
};

/// Strang split-step evolution: half potential kick, exact free propagation
/// in momentum space, half kick. steps == 0 returns psi unchanged. Throws
/// BoundaryLeakError if the packet reaches the periodic boundary.
Wavepacket evolve(const Wavepacket& psi, const PotentialProfile& V, double dt,
                  std::size_t steps, const EvolveOptions& opts = {});

/// As evolve, calling on_snapshot(step, psi) after each listed step (and for
/// step 0 when listed). Snapshot steps must be sorted.
Wavepacket evolve_with_snapshots(const Wavepacket& psi, const PotentialProfile& V, double dt,
                                 std::size_t steps, const std::vector<std::size_t>& snapshot_steps,
                                 const std::function<void(std::size_t, const Wavepacket&)>& on_snapshot,
                                 const EvolveOptions& opts = {});

/// <H> = kinetic (spectral) + potential.
double energy_expectation(const Wavepacket& psi, const PotentialProfile& V);

/// Probability to the right of the barrier. The region |x| <= barrier_right_edge
/// must hold less than 1e-6 probability, otherwise throws kScatteringIncomplete.
double transmitted_fraction(const Wavepacket& psi, double barrier_right_edge);

/// Largest |k| carrying |psi(k)| above 1e-6 of its peak.
double significant_momentum(const Wavepacket& psi);

/// Grid for a scattering run of duration total_time starting at x0 < 0 with
/// the barrier at the origin: half width covers the free flight plus 12
/// spreads at the final time, n = 8192.
Grid scattering_grid(const ClockSpec& clock, double x0, double total_time, std::size_t n = 8192);

struct ScatteringRun {
  double transmitted = 0.0;
  double norm_defect = 0.0;     // |1 - norm| at the end
  double energy_drift = 0.0;    // relative <H> change, start to end
  double boundary_fraction = 0.0;
  std::size_t steps = 0;
  Wavepacket final_state;
};

/// Sends a clock wavepacket from x0 < 0 through the barrier at the origin
/// and measures the transmitted probability after total_time.
ScatteringRun scatter_wavepacket(const ClockSpec& clock, const BarrierSpec& barrier, double x0,
                                 double total_time, double dt, std::size_t n = 8192,
                                 const EvolveOptions& opts = {});

}  // namespace clockback
