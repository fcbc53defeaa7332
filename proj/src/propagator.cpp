#include "clockback/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>

#include "clockback/error.hpp"

namespace clockback {

namespace {

// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(std::size_t n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    data_ = fftw_alloc_complex(n);
    if (!data_) throw Error(ErrorCode::kInternal, "fftw allocation failed");
    const int len = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(len, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~SpectralWorkspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(data_);
  }
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(data_); }
  std::size_t size() const { return n_; }
  void forward() { fftw_execute(forward_); }
  // Unnormalized; callers divide by n.
  void backward() { fftw_execute(backward_); }

  void load(const std::vector<Complex>& v) { std::copy(v.begin(), v.end(), data()); }
  void store(std::vector<Complex>& v) const {
    const Complex* p = reinterpret_cast<const Complex*>(data_);
    v.assign(p, p + n_);
  }

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

double grid_sum(const std::vector<Complex>& psi, auto&& weight) {
  CompensatedSum<double> s;
  for (std::size_t i = 0; i < psi.size(); ++i) s.add(weight(i) * std::norm(psi[i]));
  return s.value();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_leak(const Wavepacket& w, double tol) {
  const double leak = w.boundary_fraction();
  if (leak >= tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "wavepacket reached the grid boundary (relative amplitude %.3e, limit %.1e)",
                  leak, tol);
    throw BoundaryLeakError(buf, leak);
  }
}

}  // namespace

double Grid::k(std::size_t i) const {
  const double dk = std::numbers::pi / half_width;
  const auto ii = static_cast<double>(i);
  return i < n / 2 ? ii * dk : (ii - static_cast<double>(n)) * dk;
}

void Grid::validate() const {
  require(n >= 16 && std::has_single_bit(n), "grid size must be a power of two >= 16");
  require(std::isfinite(half_width) && half_width > 0.0, "grid half width must be positive");
}

double Wavepacket::norm() const {
  return grid_sum(psi, [](std::size_t) { return 1.0; }) * grid.dx();
}

double Wavepacket::mean_x() const {
  return grid_sum(psi, [&](std::size_t i) { return grid.x(i); }) * grid.dx() / norm();
}

double Wavepacket::spread_x() const {
  const double m = mean_x();
  const double var =
      grid_sum(psi, [&](std::size_t i) { return (grid.x(i) - m) * (grid.x(i) - m); }) *
      grid.dx() / norm();
  return std::sqrt(var);
}

double Wavepacket::boundary_fraction() const {
  double peak = 0.0;
  for (const auto& v : psi) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  const std::size_t band = std::min<std::size_t>(8, psi.size() / 2);
  for (std::size_t i = 0; i < band; ++i) {
    edge = std::max({edge, std::abs(psi[i]), std::abs(psi[psi.size() - 1 - i])});
  }
  return edge / peak;
}

double PotentialProfile::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Wavepacket gaussian_wavepacket(const Grid& grid, double mass, double x0, double k0,
                               double position_spread) {
  grid.validate();
  require(mass > 0.0, "mass must be positive");
  require(position_spread > 0.0, "position spread must be positive");
  Wavepacket w;
  w.grid = grid;
  w.mass = mass;
  w.psi.resize(grid.n);
  const double s = position_spread;
  const double amp = std::pow(2.0 * std::numbers::pi * s * s, -0.25);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double d = grid.x(i) - x0;
    w.psi[i] = std::polar(amp * std::exp(-d * d / (4.0 * s * s)), k0 * d);
  }
  // Renormalize on the grid so the discrete norm is exactly 1.
  const double nrm = std::sqrt(w.norm());
  for (auto& v : w.psi) v /= nrm;
  return w;
}

Wavepacket clock_wavepacket(const Grid& grid, const ClockSpec& clock, double x0) {
  return gaussian_wavepacket(grid, clock.mass(), x0, clock.mean_momentum(),
                             clock.position_spread());
}

PotentialProfile zero_potential(const Grid& grid) {
  grid.validate();
  return {std::vector<double>(grid.n, 0.0)};
}

PotentialProfile rect_potential(const Grid& grid, const BarrierSpec& barrier) {
  grid.validate();
  barrier.validate();
  require(!barrier.is_delta(), "grid potential needs a finite-width barrier");
  PotentialProfile p{std::vector<double>(grid.n, 0.0)};
  const double dx = grid.dx();
  const double lo = -0.5 * barrier.width;
  const double hi = 0.5 * barrier.width;
  const double height = barrier.height();
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double a = grid.x(i) - 0.5 * dx;
    const double b = grid.x(i) + 0.5 * dx;
    const double overlap = std::max(0.0, std::min(b, hi) - std::max(a, lo));
    p.values[i] = height * overlap / dx;
  }
  return p;
}

double significant_momentum(const Wavepacket& psi) {
  SpectralWorkspace ws(psi.grid.n);
  ws.load(psi.psi);
  ws.forward();
  const Complex* d = ws.data();
  double peak = 0.0;
  for (std::size_t i = 0; i < psi.grid.n; ++i) peak = std::max(peak, std::abs(d[i]));
  double kmax = 0.0;
  for (std::size_t i = 0; i < psi.grid.n; ++i) {
    if (std::abs(d[i]) > 1e-6 * peak) kmax = std::max(kmax, std::abs(psi.grid.k(i)));
  }
  return kmax;
}

Wavepacket evolve_with_snapshots(const Wavepacket& psi, const PotentialProfile& V, double dt,
                                 std::size_t steps, const std::vector<std::size_t>& snapshot_steps,
                                 const std::function<void(std::size_t, const Wavepacket&)>& on_snapshot,
                                 const EvolveOptions& opts) {
  psi.grid.validate();
  const std::size_t n = psi.grid.n;
  require(psi.psi.size() == n && V.values.size() == n, "wavepacket and potential size mismatch");
  require(std::isfinite(dt) && dt > 0.0, "time step must be positive");
  require(std::is_sorted(snapshot_steps.begin(), snapshot_steps.end()),
          "snapshot steps must be sorted");

  std::size_t next_snapshot = 0;
  auto maybe_snapshot = [&](std::size_t step, const Wavepacket& w) {
    while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == step) {
      if (on_snapshot) on_snapshot(step, w);
      ++next_snapshot;
    }
  };
  maybe_snapshot(0, psi);
  if (steps == 0) return psi;

  const double kmax = significant_momentum(psi);
  const double kinetic_limit = dt * kmax * kmax / (2.0 * psi.mass);
  const double potential_limit = dt * V.max_abs();
  require(kinetic_limit <= opts.stability_limit && potential_limit <= opts.stability_limit,
          "time step violates split-step stability limits (dt k^2/2M = " +
              sci(kinetic_limit) + ", dt max|V| = " + sci(potential_limit) +
              ")");

  std::vector<Complex> half_kick(n);
  std::vector<Complex> drift(n);
  for (std::size_t i = 0; i < n; ++i) {
    half_kick[i] = std::polar(1.0, -0.5 * dt * V.values[i]);
    const double k = psi.grid.k(i);
    drift[i] = std::polar(1.0 / static_cast<double>(n), -dt * k * k / (2.0 * psi.mass));
  }

  Wavepacket out = psi;
  SpectralWorkspace ws(n);
  ws.load(psi.psi);
  Complex* d = ws.data();
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) d[i] *= half_kick[i];
    ws.forward();
    for (std::size_t i = 0; i < n; ++i) d[i] *= drift[i];
    ws.backward();
    for (std::size_t i = 0; i < n; ++i) d[i] *= half_kick[i];

    const bool snapshot_due =
        next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == step;
    const bool leak_due = step == steps ||
                          (opts.leak_check_every > 0 && step % opts.leak_check_every == 0);
    if (snapshot_due || leak_due) {
      ws.store(out.psi);
      check_leak(out, opts.leak_tolerance);
      maybe_snapshot(step, out);
    }
  }
  ws.store(out.psi);
  return out;
}

Wavepacket evolve(const Wavepacket& psi, const PotentialProfile& V, double dt, std::size_t steps,
                  const EvolveOptions& opts) {
  return evolve_with_snapshots(psi, V, dt, steps, {}, nullptr, opts);
}

double energy_expectation(const Wavepacket& psi, const PotentialProfile& V) {
  const std::size_t n = psi.grid.n;
  SpectralWorkspace ws(n);
  ws.load(psi.psi);
  ws.forward();
  const Complex* d = ws.data();
  CompensatedSum<double> kin;
  CompensatedSum<double> weight;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = psi.grid.k(i);
    kin.add(std::norm(d[i]) * k * k / (2.0 * psi.mass));
    weight.add(std::norm(d[i]));
  }
  const double kinetic = kin.value() / weight.value();
  const double pot = grid_sum(psi.psi, [&](std::size_t i) { return V.values[i]; }) /
                     grid_sum(psi.psi, [](std::size_t) { return 1.0; });
  return kinetic + pot;
}

double transmitted_fraction(const Wavepacket& psi, double barrier_right_edge) {
  const double dx = psi.grid.dx();
  const double inside = grid_sum(psi.psi, [&](std::size_t i) {
                          return std::abs(psi.grid.x(i)) <= barrier_right_edge + dx ? 1.0 : 0.0;
                        }) *
                        dx;
  if (inside >= 1e-6) {
    throw Error(ErrorCode::kScatteringIncomplete,
                "scattering not complete: interaction-region probability " +
                    std::to_string(inside));
  }
  const double right = grid_sum(psi.psi, [&](std::size_t i) {
                         return psi.grid.x(i) > barrier_right_edge ? 1.0 : 0.0;
                       }) *
                       dx;
  return std::clamp(right / psi.norm(), 0.0, 1.0);
}

Grid scattering_grid(const ClockSpec& clock, double x0, double total_time, std::size_t n) {
  const double travel = clock.velocity() * total_time;
  const double reach = std::max(std::abs(x0), std::abs(x0 + travel));
  Grid g;
  g.n = n;
  g.half_width = reach + 12.0 * position_spread_at(clock, total_time);
  g.validate();
  return g;
}

ScatteringRun scatter_wavepacket(const ClockSpec& clock, const BarrierSpec& barrier, double x0,
                                 double total_time, double dt, std::size_t n,
                                 const EvolveOptions& opts) {
  require(x0 < 0.0, "wavepacket must start left of the barrier");
  require(dt > 0.0 && total_time > 0.0, "time step and duration must be positive");
  const Grid grid = scattering_grid(clock, x0, total_time, n);
  const Wavepacket start = clock_wavepacket(grid, clock, x0);
  const PotentialProfile V = rect_potential(grid, barrier);
  const auto steps = static_cast<std::size_t>(std::llround(total_time / dt));
  ScatteringRun run;
  run.steps = steps;
  run.final_state = evolve(start, V, total_time / static_cast<double>(steps), steps, opts);
  run.boundary_fraction = run.final_state.boundary_fraction();
  run.transmitted = transmitted_fraction(run.final_state, barrier.right_edge());
  run.norm_defect = std::abs(1.0 - run.final_state.norm());
  const double e0 = energy_expectation(start, V);
  run.energy_drift = std::abs(energy_expectation(run.final_state, V) - e0) / std::abs(e0);
  return run;
}

}  // namespace clockback
