#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace clockback {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Complex error functions
// ---------------------------------------------------------------------------

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz), valid on the whole plane.
///
/// For |z| < 8 with Im z >= 0 a 40-term Weideman rational expansion is used;
/// outside that disc the Laplace continued fraction (depth 30). The lower half
/// plane is reached through w(z) = 2 exp(-z^2) - w(-z). Relative accuracy is
/// about 2e-14 away from the zeros of w.
Complex faddeeva_w(Complex z);

struct SpecialValue {
  Complex value;
  bool saturated = false;  // exp(-z^2) overflowed; value clamped to DBL_MAX
};

/// erfc(z) for complex z with an overflow flag.
SpecialValue erfc_complex_flagged(Complex z);

/// erfc(z); saturated results are clamped (see erfc_complex_flagged).
Complex erfc_complex(Complex z);

/// erf(z) = 1 - erfc(z).
Complex erf_complex(Complex z);

/// Scaled complementary error function exp(x^2) erfc(x) for real x.
double erfcx(double x);

// ---------------------------------------------------------------------------
// Summation
// ---------------------------------------------------------------------------

/// Neumaier-compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

// Complex values are compensated component-wise.
template <>
class CompensatedSum<Complex> {
 public:
  void add(Complex x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

/// Pairwise sum of a span; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

using ComplexIntegrand = std::function<Complex(double)>;

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 4000;
};

struct QuadratureResult {
  Complex value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::size_t subdivisions = 0;
  // False when every remaining interval sits at its rounding floor and the
  // requested tolerance is below what double precision can deliver.
  bool converged = true;
};

/// Globally adaptive Gauss-Kronrod (10/21) quadrature on a finite interval.
/// Stops when error_estimate <= max(abs_tol, rel_tol * |value|). Throws
/// QuadratureError with the best estimate after max_subdivisions bisections.
QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a,
                                    double b, const QuadratureOptions& opts);

/// Convenience form: abs_tol = rel_tol = tol.
QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a,
                                    double b, double tol);

/// Integral over [a, inf) through x = a + t / (1 - t), t in [0, 1).
QuadratureResult integrate_to_infinity(const ComplexIntegrand& f, double a,
                                       const QuadratureOptions& opts);

/// Integral over (-inf, inf) through x = t / (1 - t^2), t in (-1, 1).
QuadratureResult integrate_real_line(const ComplexIntegrand& f,
                                     const QuadratureOptions& opts);

// ---------------------------------------------------------------------------
// Parallel helpers
// ---------------------------------------------------------------------------

/// Caps the worker count used by parallel sweeps (0 = hardware default).
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n) on up to max_threads() workers. Each index is
/// visited exactly once; the first exception thrown is rethrown here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace clockback
