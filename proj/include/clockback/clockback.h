/* clockback C interface.
 *
 * Every call returns a cb_status; on failure cb_last_error() holds a message
 * for the calling thread until its next failing call. Handles are opaque and
 * released with the matching *_destroy function (NULL is accepted).
 */
#ifndef CLOCKBACK_H
#define CLOCKBACK_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CLOCKBACK_BUILDING_LIBRARY)
#    define CB_API __declspec(dllexport)
#  else
#    define CB_API __declspec(dllimport)
#  endif
#else
#  define CB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_INVALID_ARGUMENT = 1,
  CB_ERR_DOMAIN = 2,
  CB_ERR_NO_CONVERGENCE = 3,
  CB_ERR_GRID_TOO_NARROW = 4,
  CB_ERR_BOUNDARY_LEAK = 5,
  CB_ERR_SCATTERING_INCOMPLETE = 6,
  CB_ERR_ZERO_PROBABILITY = 7,
  CB_ERR_IO = 8,
  CB_ERR_INTERNAL = 9
} cb_status;

CB_API const char* cb_last_error(void);
CB_API const char* cb_status_name(cb_status status);

/* 0 restores the default (hardware concurrency). */
CB_API void cb_set_max_threads(unsigned threads);
CB_API unsigned cb_max_threads(void);

/* ---- numerics ---- */

CB_API cb_status cb_erfc(double re, double im, double* out_re, double* out_im);

/* ---- clock ---- */

typedef struct cb_clock_spec {
  double mass;
  double mean_momentum;
  double position_spread;
} cb_clock_spec;

typedef struct cb_clock_quality {
  double dtau0;
  double usable_time;
  double quality_ratio;
  double commutator_deviation;
  double energy_ratio;
  double momentum_spread;
  int good_clock;
} cb_clock_quality;

CB_API cb_status cb_clock_quality_eval(const cb_clock_spec* clock, cb_clock_quality* out);
CB_API cb_status cb_time_uncertainty(const cb_clock_spec* clock, double tau, double* out);

/* ---- scattering ---- */

/* width == 0 selects the delta barrier. */
typedef struct cb_barrier {
  double lambda;
  double width;
  double pointer_coordinate;
  double eigenvalue;
  double mass;
} cb_barrier;

typedef struct cb_amplitudes {
  double k;
  double re_T, im_T;
  double re_R, im_R;
  double abs2_T, abs2_R;
  double unitarity_defect;
} cb_amplitudes;

CB_API cb_status cb_barrier_amplitudes(double k, const cb_barrier* barrier, cb_amplitudes* out);
CB_API cb_status cb_delta_amplitudes(double k, const cb_barrier* barrier, cb_amplitudes* out);
CB_API cb_status cb_alpha(double k, double lambda, double j, double mass, double* out);
/* int |phi(k)|^2 |T(k)|^2 dk for a Gaussian momentum distribution. */
CB_API cb_status cb_averaged_transmission(double mean_k, double sigma_k,
                                          const cb_barrier* barrier, double* out);

/* ---- pointer ---- */

typedef enum cb_pointer_method { CB_CLOSED_FORM = 0, CB_QUADRATURE = 1 } cb_pointer_method;

typedef struct cb_pointer cb_pointer;

CB_API cb_status cb_pointer_value(double P, double alpha, double Delta, cb_pointer_method method,
                                  double tol, double* re, double* im);
/* Curve on the default adaptive grid with the given number of points. */
CB_API cb_status cb_pointer_create(double alpha, double Delta, size_t points,
                                   cb_pointer_method method, cb_pointer** out);
CB_API cb_status cb_pointer_create_on_grid(double alpha, double Delta, const double* grid,
                                           size_t n, cb_pointer_method method, cb_pointer** out);
CB_API size_t cb_pointer_size(const cb_pointer* p);
/* Copies grid and amplitudes; any output pointer may be NULL. */
CB_API cb_status cb_pointer_data(const cb_pointer* p, double* grid, double* re, double* im);
CB_API cb_status cb_pointer_moments(const cb_pointer* p, double* norm, double* mean, double* std,
                                    double* skewness);
CB_API void cb_pointer_destroy(cb_pointer* p);

/* ---- entanglement ---- */

typedef struct cb_momentum_state {
  double mean_k;
  double sigma_k;
  double offset;
} cb_momentum_state;

typedef struct cb_postselection cb_postselection;

CB_API cb_status cb_post_select(const double* eigenvalues, const double* amp_re,
                                const double* amp_im, size_t n, double P0,
                                const cb_momentum_state* clock, double mass, double tol,
                                cb_postselection** out);
/* Number of eigenvalues kept on the post-selected branch. */
CB_API size_t cb_postselection_dimension(const cb_postselection* s);
CB_API cb_status cb_postselection_branch(const cb_postselection* s, double* eigenvalues,
                                         double* amp_re, double* amp_im);
/* Row-major dimension x dimension matrices. */
CB_API cb_status cb_postselection_gram(const cb_postselection* s, double* re, double* im);
CB_API cb_status cb_postselection_rho(const cb_postselection* s, double* re, double* im);
CB_API double cb_postselection_purity(const cb_postselection* s);
CB_API double cb_postselection_branch_probability(const cb_postselection* s);
CB_API void cb_postselection_destroy(cb_postselection* s);

CB_API cb_status cb_clock_overlap(double j, double j2, double P0, const cb_momentum_state* clock,
                                  double mass, double tol, double* re, double* im);

/* ---- bounds ---- */

typedef enum cb_regime {
  CB_REGIME_WEAK = 0,
  CB_REGIME_VALID_MEASUREMENT = 1,
  CB_REGIME_STRONG_BACKREACTION = 2,
  CB_REGIME_IMPULSIVE = 3
} cb_regime;

/* barrier.mass and barrier.pointer_coordinate are ignored: the clock mass
 * and Q = 1/resolution are used. */
typedef struct cb_scenario {
  cb_clock_spec clock;
  cb_barrier barrier;
  double resolution;
  double mean_J;
  double delta_J;
  double omega;
  double ground_energy;
} cb_scenario;

typedef struct cb_regime_report {
  cb_regime regime;
  double q_width;
  double alpha_over_delta;
  double energy_time;
  double omega_time;
  double duration;
  int bound_satisfied;
} cb_regime_report;

CB_API const char* cb_regime_name(cb_regime regime);
CB_API cb_status cb_regime_classify(const cb_scenario* s, double k, cb_regime_report* out);
CB_API cb_status cb_accuracy_bound(double clock_energy, double ground_energy, double duration,
                                   double* out);
CB_API cb_status cb_min_coupling_spread(const cb_scenario* s, double* out);

/* ---- propagator ---- */

typedef struct cb_propagate_options {
  double x0;
  double total_time;
  double dt;
  size_t grid_points;
  double half_width;      /* <= 0 picks the scattering default */
  double leak_tolerance;  /* <= 0 keeps 1e-8 */
} cb_propagate_options;

typedef struct cb_propagation cb_propagation;

/* Snapshot times are rounded to the nearest step and must be sorted. */
CB_API cb_status cb_propagate(const cb_clock_spec* clock, const cb_barrier* barrier,
                              const cb_propagate_options* opts, const double* snapshot_times,
                              size_t n_snapshots, cb_propagation** out);
CB_API double cb_propagation_transmitted(const cb_propagation* p);
CB_API double cb_propagation_norm_defect(const cb_propagation* p);
CB_API double cb_propagation_energy_drift(const cb_propagation* p);
CB_API size_t cb_propagation_grid_points(const cb_propagation* p);
CB_API size_t cb_propagation_snapshot_count(const cb_propagation* p);
CB_API double cb_propagation_snapshot_time(const cb_propagation* p, size_t i);
CB_API cb_status cb_propagation_snapshot(const cb_propagation* p, size_t i, double* x,
                                         double* re, double* im);
CB_API void cb_propagation_destroy(cb_propagation* p);

/* ---- validation ---- */

typedef struct cb_validation cb_validation;

CB_API cb_status cb_validate(int include_propagator, size_t unitarity_samples,
                             unsigned long long seed, cb_validation** out);
CB_API size_t cb_validation_count(const cb_validation* v);
/* Strings stay valid until the handle is destroyed. */
CB_API cb_status cb_validation_check(const cb_validation* v, size_t i, const char** name,
                                     int* passed, double* measured, double* threshold,
                                     const char** detail);
CB_API void cb_validation_destroy(cb_validation* v);

#ifdef __cplusplus
}
#endif

#endif
