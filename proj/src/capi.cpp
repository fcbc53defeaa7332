#include "clockback/clockback.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "clockback/bounds.hpp"
#include "clockback/clock.hpp"
#include "clockback/entanglement.hpp"
#include "clockback/error.hpp"
#include "clockback/numerics.hpp"
#include "clockback/pointer.hpp"
#include "clockback/propagator.hpp"
#include "clockback/scattering.hpp"
#include "clockback/validate.hpp"

namespace cb = clockback;

struct cb_pointer {
  cb::PointerWavefunction wf;
};

struct cb_postselection {
  cb::PostSelection sel;
};

struct cb_propagation {
  double transmitted = std::numeric_limits<double>::quiet_NaN();
  double norm_defect = 0.0;
  double energy_drift = 0.0;
  cb::Grid grid;
  std::vector<double> times;
  std::vector<std::vector<cb::Complex>> snapshots;
};

struct cb_validation {
  std::vector<cb::CheckResult> checks;
};

namespace {

thread_local std::string g_last_error;

cb_status to_status(cb::ErrorCode c) {
  switch (c) {
    case cb::ErrorCode::kOk: return CB_OK;
    case cb::ErrorCode::kInvalidArgument: return CB_ERR_INVALID_ARGUMENT;
    case cb::ErrorCode::kDomain: return CB_ERR_DOMAIN;
    case cb::ErrorCode::kNoConvergence: return CB_ERR_NO_CONVERGENCE;
    case cb::ErrorCode::kGridTooNarrow: return CB_ERR_GRID_TOO_NARROW;
    case cb::ErrorCode::kBoundaryLeak: return CB_ERR_BOUNDARY_LEAK;
    case cb::ErrorCode::kScatteringIncomplete: return CB_ERR_SCATTERING_INCOMPLETE;
    case cb::ErrorCode::kZeroProbability: return CB_ERR_ZERO_PROBABILITY;
    case cb::ErrorCode::kIo: return CB_ERR_IO;
    case cb::ErrorCode::kInternal: return CB_ERR_INTERNAL;
  }
  return CB_ERR_INTERNAL;
}

template <class F>
cb_status guard(F&& f) {
  try {
    f();
    return CB_OK;
  } catch (const cb::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  cb::require(p != nullptr, std::string(what) + " must not be NULL");
}

cb::ClockSpec to_clock(const cb_clock_spec* c) {
  need(c, "clock");
  return cb::ClockSpec(c->mass, c->mean_momentum, c->position_spread);
}

cb::BarrierSpec to_barrier(const cb_barrier* b) {
  need(b, "barrier");
  cb::BarrierSpec out;
  out.lambda = b->lambda;
  out.width = b->width;
  out.pointer_coordinate = b->pointer_coordinate;
  out.eigenvalue = b->eigenvalue;
  out.mass = b->mass;
  out.validate();
  return out;
}

cb::ClockMomentumState to_state(const cb_momentum_state* s) {
  need(s, "momentum state");
  cb::ClockMomentumState out;
  out.mean_k = s->mean_k;
  out.sigma_k = s->sigma_k;
  out.offset = s->offset;
  out.validate();
  return out;
}

cb::MeasurementScenario to_scenario(const cb_scenario* s) {
  need(s, "scenario");
  cb::MeasurementScenario out;
  out.clock = to_clock(&s->clock);
  out.barrier = to_barrier(&s->barrier);
  out.pointer.resolution = s->resolution;
  out.mean_J = s->mean_J;
  out.delta_J = s->delta_J;
  out.omega = s->omega;
  out.ground_energy = s->ground_energy;
  out.validate();
  return out;
}

void fill(const cb::ScatteringAmplitudes& a, cb_amplitudes* out) {
  out->k = a.k;
  out->re_T = a.T.real();
  out->im_T = a.T.imag();
  out->re_R = a.R.real();
  out->im_R = a.R.imag();
  out->abs2_T = a.transmission();
  out->abs2_R = a.reflection();
  out->unitarity_defect = a.unitarity_defect();
}

cb::PointerMethod to_method(cb_pointer_method m) {
  cb::require(m == CB_CLOSED_FORM || m == CB_QUADRATURE, "unknown pointer method");
  return m == CB_CLOSED_FORM ? cb::PointerMethod::kClosedForm : cb::PointerMethod::kQuadrature;
}

void split_matrix(const cb::DensityMatrix& m, double* re, double* im) {
  const std::size_t n = m.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (re) re[i * n + j] = m(i, j).real();
      if (im) im[i * n + j] = m(i, j).imag();
    }
  }
}

}  // namespace

extern "C" {

const char* cb_last_error(void) { return g_last_error.c_str(); }

const char* cb_status_name(cb_status status) {
  switch (status) {
    case CB_OK: return "ok";
    case CB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CB_ERR_DOMAIN: return "domain";
    case CB_ERR_NO_CONVERGENCE: return "no_convergence";
    case CB_ERR_GRID_TOO_NARROW: return "grid_too_narrow";
    case CB_ERR_BOUNDARY_LEAK: return "boundary_leak";
    case CB_ERR_SCATTERING_INCOMPLETE: return "scattering_incomplete";
    case CB_ERR_ZERO_PROBABILITY: return "zero_probability";
    case CB_ERR_IO: return "io";
    case CB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void cb_set_max_threads(unsigned threads) { cb::set_max_threads(threads); }

unsigned cb_max_threads(void) { return cb::max_threads(); }

cb_status cb_erfc(double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    need(out_re, "out_re");
    need(out_im, "out_im");
    const cb::Complex v = cb::erfc_complex({re, im});
    *out_re = v.real();
    *out_im = v.imag();
  });
}

cb_status cb_clock_quality_eval(const cb_clock_spec* clock, cb_clock_quality* out) {
  return guard([&] {
    need(out, "out");
    const cb::ClockSpec c = to_clock(clock);
    const cb::ClockQuality q = cb::clock_quality(c);
    out->dtau0 = q.dtau0;
    out->usable_time = q.usable_time;
    out->quality_ratio = q.quality_ratio;
    out->commutator_deviation = q.commutator_deviation;
    out->energy_ratio = q.energy_ratio;
    out->momentum_spread = c.momentum_spread();
    out->good_clock = q.good_clock ? 1 : 0;
  });
}

cb_status cb_time_uncertainty(const cb_clock_spec* clock, double tau, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cb::time_uncertainty(to_clock(clock), tau);
  });
}

cb_status cb_barrier_amplitudes(double k, const cb_barrier* barrier, cb_amplitudes* out) {
  return guard([&] {
    need(out, "out");
    fill(cb::barrier_amplitudes(k, to_barrier(barrier)), out);
  });
}

cb_status cb_delta_amplitudes(double k, const cb_barrier* barrier, cb_amplitudes* out) {
  return guard([&] {
    need(out, "out");
    fill(cb::delta_barrier_transmission(k, to_barrier(barrier)), out);
  });
}

cb_status cb_alpha(double k, double lambda, double j, double mass, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cb::alpha(k, lambda, j, mass);
  });
}

cb_status cb_averaged_transmission(double mean_k, double sigma_k, const cb_barrier* barrier,
                                   double* out) {
  return guard([&] {
    need(out, "out");
    const cb::BarrierSpec b = to_barrier(barrier);
    cb::require(sigma_k > 0.0 && mean_k > 0.0, "momentum mean and spread must be positive");
    *out = cb::averaged_transmission(mean_k, sigma_k, b.mass, b.lambda, b.width,
                                     b.pointer_coordinate, b.eigenvalue);
  });
}

cb_status cb_pointer_value(double P, double alpha, double Delta, cb_pointer_method method,
                           double tol, double* re, double* im) {
  return guard([&] {
    need(re, "re");
    need(im, "im");
    cb::Complex v;
    if (to_method(method) == cb::PointerMethod::kClosedForm) {
      v = cb::final_pointer_closedform(P, alpha, Delta);
    } else {
      v = cb::final_pointer_quadrature(P, alpha, Delta, tol > 0.0 ? tol : cb::kPointerQuadratureTol);
    }
    *re = v.real();
    *im = v.imag();
  });
}

cb_status cb_pointer_create(double alpha, double Delta, size_t points, cb_pointer_method method,
                            cb_pointer** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    const auto grid = cb::default_pointer_grid(alpha, Delta, points);
    auto p = std::make_unique<cb_pointer>();
    p->wf = cb::pointer_distribution(alpha, Delta, grid, to_method(method));
    *out = p.release();
  });
}

cb_status cb_pointer_create_on_grid(double alpha, double Delta, const double* grid, size_t n,
                                    cb_pointer_method method, cb_pointer** out) {
  return guard([&] {
    need(out, "out");
    need(grid, "grid");
    *out = nullptr;
    auto p = std::make_unique<cb_pointer>();
    p->wf = cb::pointer_distribution(alpha, Delta, std::span<const double>(grid, n),
                                     to_method(method));
    *out = p.release();
  });
}

size_t cb_pointer_size(const cb_pointer* p) { return p ? p->wf.grid.size() : 0; }

cb_status cb_pointer_data(const cb_pointer* p, double* grid, double* re, double* im) {
  return guard([&] {
    need(p, "pointer");
    for (std::size_t i = 0; i < p->wf.grid.size(); ++i) {
      if (grid) grid[i] = p->wf.grid[i];
      if (re) re[i] = p->wf.amplitudes[i].real();
      if (im) im[i] = p->wf.amplitudes[i].imag();
    }
  });
}

cb_status cb_pointer_moments(const cb_pointer* p, double* norm, double* mean, double* std,
                             double* skewness) {
  return guard([&] {
    need(p, "pointer");
    if (norm) *norm = p->wf.norm;
    if (mean) *mean = p->wf.moments.mean;
    if (std) *std = p->wf.moments.std;
    if (skewness) *skewness = p->wf.moments.skewness;
  });
}

void cb_pointer_destroy(cb_pointer* p) { delete p; }

cb_status cb_post_select(const double* eigenvalues, const double* amp_re, const double* amp_im,
                         size_t n, double P0, const cb_momentum_state* clock, double mass,
                         double tol, cb_postselection** out) {
  return guard([&] {
    need(out, "out");
    need(eigenvalues, "eigenvalues");
    need(amp_re, "amp_re");
    *out = nullptr;
    cb::SystemSpec sys;
    for (std::size_t i = 0; i < n; ++i) {
      sys.eigenvalues.push_back(eigenvalues[i]);
      sys.amplitudes.emplace_back(amp_re[i], amp_im ? amp_im[i] : 0.0);
    }
    auto s = std::make_unique<cb_postselection>();
    s->sel = cb::post_select(sys, P0, to_state(clock), mass, tol > 0.0 ? tol : cb::kOverlapTol);
    *out = s.release();
  });
}

size_t cb_postselection_dimension(const cb_postselection* s) {
  return s ? s->sel.eigenvalues.size() : 0;
}

cb_status cb_postselection_branch(const cb_postselection* s, double* eigenvalues, double* amp_re,
                                  double* amp_im) {
  return guard([&] {
    need(s, "postselection");
    for (std::size_t i = 0; i < s->sel.eigenvalues.size(); ++i) {
      if (eigenvalues) eigenvalues[i] = s->sel.eigenvalues[i];
      if (amp_re) amp_re[i] = s->sel.amplitudes[i].real();
      if (amp_im) amp_im[i] = s->sel.amplitudes[i].imag();
    }
  });
}

cb_status cb_postselection_gram(const cb_postselection* s, double* re, double* im) {
  return guard([&] {
    need(s, "postselection");
    split_matrix(s->sel.gram, re, im);
  });
}

cb_status cb_postselection_rho(const cb_postselection* s, double* re, double* im) {
  return guard([&] {
    need(s, "postselection");
    split_matrix(s->sel.rho, re, im);
  });
}

double cb_postselection_purity(const cb_postselection* s) {
  return s ? s->sel.purity : std::numeric_limits<double>::quiet_NaN();
}

double cb_postselection_branch_probability(const cb_postselection* s) {
  return s ? s->sel.branch_probability : std::numeric_limits<double>::quiet_NaN();
}

void cb_postselection_destroy(cb_postselection* s) { delete s; }

cb_status cb_clock_overlap(double j, double j2, double P0, const cb_momentum_state* clock,
                           double mass, double tol, double* re, double* im) {
  return guard([&] {
    need(re, "re");
    need(im, "im");
    const auto o = cb::postselected_clock_overlap(j, j2, P0, to_state(clock), mass,
                                                  tol > 0.0 ? tol : cb::kOverlapTol);
    *re = o.value.real();
    *im = o.value.imag();
  });
}

const char* cb_regime_name(cb_regime regime) {
  switch (regime) {
    case CB_REGIME_WEAK: return "WEAK";
    case CB_REGIME_VALID_MEASUREMENT: return "VALID_MEASUREMENT";
    case CB_REGIME_STRONG_BACKREACTION: return "STRONG_BACKREACTION";
    case CB_REGIME_IMPULSIVE: return "IMPULSIVE";
  }
  return "UNKNOWN";
}

cb_status cb_regime_classify(const cb_scenario* s, double k, cb_regime_report* out) {
  return guard([&] {
    need(out, "out");
    const auto r = cb::regime_classify(to_scenario(s), k);
    switch (r.regime) {
      case cb::Regime::kWeak: out->regime = CB_REGIME_WEAK; break;
      case cb::Regime::kValidMeasurement: out->regime = CB_REGIME_VALID_MEASUREMENT; break;
      case cb::Regime::kStrongBackreaction: out->regime = CB_REGIME_STRONG_BACKREACTION; break;
      case cb::Regime::kImpulsive: out->regime = CB_REGIME_IMPULSIVE; break;
    }
    out->q_width = r.figures.q_width;
    out->alpha_over_delta = r.figures.alpha_over_delta;
    out->energy_time = r.figures.energy_time;
    out->omega_time = r.figures.omega_time;
    out->duration = r.duration;
    out->bound_satisfied = r.bound_satisfied ? 1 : 0;
  });
}

cb_status cb_accuracy_bound(double clock_energy, double ground_energy, double duration,
                            double* out) {
  return guard([&] {
    need(out, "out");
    *out = cb::accuracy_bound(clock_energy, ground_energy, duration);
  });
}

cb_status cb_min_coupling_spread(const cb_scenario* s, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cb::min_coupling_spread(to_scenario(s));
  });
}

cb_status cb_propagate(const cb_clock_spec* clock, const cb_barrier* barrier,
                       const cb_propagate_options* opts, const double* snapshot_times,
                       size_t n_snapshots, cb_propagation** out) {
  return guard([&] {
    need(out, "out");
    need(opts, "options");
    *out = nullptr;
    cb::require(n_snapshots == 0 || snapshot_times != nullptr, "snapshot times must not be NULL");
    const cb::ClockSpec c = to_clock(clock);
    cb::BarrierSpec b = to_barrier(barrier);
    b.mass = c.mass();
    cb::require(opts->x0 < 0.0, "wavepacket must start left of the barrier");
    cb::require(opts->dt > 0.0 && opts->total_time > 0.0,
                "time step and duration must be positive");

    cb::Grid grid = cb::scattering_grid(c, opts->x0, opts->total_time, opts->grid_points);
    if (opts->half_width > 0.0) {
      grid.half_width = opts->half_width;
      grid.validate();
    }
    const auto steps = static_cast<std::size_t>(std::llround(opts->total_time / opts->dt));
    cb::require(steps > 0, "duration shorter than one time step");
    const double dt = opts->total_time / static_cast<double>(steps);

    std::vector<std::size_t> snap_steps;
    for (std::size_t i = 0; i < n_snapshots; ++i) {
      const double t = snapshot_times[i];
      cb::require(t >= 0.0 && t <= opts->total_time, "snapshot time outside [0, total_time]");
      const auto s = static_cast<std::size_t>(std::llround(t / dt));
      cb::require(snap_steps.empty() || s > snap_steps.back(),
                  "snapshot times must be strictly increasing on the step grid");
      snap_steps.push_back(s);
    }

    cb::EvolveOptions eo;
    if (opts->leak_tolerance > 0.0) eo.leak_tolerance = opts->leak_tolerance;

    auto p = std::make_unique<cb_propagation>();
    p->grid = grid;
    const cb::Wavepacket start = cb::clock_wavepacket(grid, c, opts->x0);
    const cb::PotentialProfile V = cb::rect_potential(grid, b);
    const cb::Wavepacket end = cb::evolve_with_snapshots(
        start, V, dt, steps, snap_steps,
        [&](std::size_t step, const cb::Wavepacket& w) {
          p->times.push_back(static_cast<double>(step) * dt);
          p->snapshots.push_back(w.psi);
        },
        eo);
    try {
      p->transmitted = cb::transmitted_fraction(end, b.right_edge());
    } catch (const cb::Error& e) {
      if (e.code() != cb::ErrorCode::kScatteringIncomplete) throw;
    }
    p->norm_defect = std::abs(1.0 - end.norm());
    const double e0 = cb::energy_expectation(start, V);
    p->energy_drift = std::abs(cb::energy_expectation(end, V) - e0) / std::abs(e0);
    *out = p.release();
  });
}

double cb_propagation_transmitted(const cb_propagation* p) {
  return p ? p->transmitted : std::numeric_limits<double>::quiet_NaN();
}

double cb_propagation_norm_defect(const cb_propagation* p) {
  return p ? p->norm_defect : std::numeric_limits<double>::quiet_NaN();
}

double cb_propagation_energy_drift(const cb_propagation* p) {
  return p ? p->energy_drift : std::numeric_limits<double>::quiet_NaN();
}

size_t cb_propagation_grid_points(const cb_propagation* p) { return p ? p->grid.n : 0; }

size_t cb_propagation_snapshot_count(const cb_propagation* p) {
  return p ? p->snapshots.size() : 0;
}

double cb_propagation_snapshot_time(const cb_propagation* p, size_t i) {
  return p && i < p->times.size() ? p->times[i] : std::numeric_limits<double>::quiet_NaN();
}

cb_status cb_propagation_snapshot(const cb_propagation* p, size_t i, double* x, double* re,
                                  double* im) {
  return guard([&] {
    need(p, "propagation");
    cb::require(i < p->snapshots.size(), "snapshot index out of range");
    const auto& psi = p->snapshots[i];
    for (std::size_t k = 0; k < psi.size(); ++k) {
      if (x) x[k] = p->grid.x(k);
      if (re) re[k] = psi[k].real();
      if (im) im[k] = psi[k].imag();
    }
  });
}

void cb_propagation_destroy(cb_propagation* p) { delete p; }

cb_status cb_validate(int include_propagator, size_t unitarity_samples, unsigned long long seed,
                      cb_validation** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    cb::ValidationOptions o;
    o.include_propagator = include_propagator != 0;
    if (unitarity_samples > 0) o.unitarity_samples = unitarity_samples;
    o.seed = seed;
    auto v = std::make_unique<cb_validation>();
    v->checks = cb::run_validation(o);
    *out = v.release();
  });
}

size_t cb_validation_count(const cb_validation* v) { return v ? v->checks.size() : 0; }

cb_status cb_validation_check(const cb_validation* v, size_t i, const char** name, int* passed,
                              double* measured, double* threshold, const char** detail) {
  return guard([&] {
    need(v, "validation");
    cb::require(i < v->checks.size(), "check index out of range");
    const auto& c = v->checks[i];
    if (name) *name = c.name.c_str();
    if (passed) *passed = c.passed ? 1 : 0;
    if (measured) *measured = c.measured;
    if (threshold) *threshold = c.threshold;
    if (detail) *detail = c.detail.c_str();
  });
}

void cb_validation_destroy(cb_validation* v) { delete v; }

}  // extern "C"
