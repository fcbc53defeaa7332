#include "clockback/numerics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <queue>
#include <thread>
#include <vector>

#include "clockback/error.hpp"

namespace clockback {

namespace {

constexpr int kWeidemanTerms = 40;
constexpr double kContinuedFractionRadius = 8.0;
constexpr int kContinuedFractionDepth = 30;
constexpr double kExpOverflow = 709.0;

struct WeidemanTable {
  double L;
  std::array<double, kWeidemanTerms + 1> a;  // a[1..N]
};

// Coefficients of the rational expansion of w(z) in Z = (L + iz)/(L - iz),
// obtained from a cosine transform of exp(-t^2)(L^2 + t^2) sampled at
// t = L tan(theta/2).
WeidemanTable make_weideman_table() {
  WeidemanTable tab{};
  const int n = kWeidemanTerms;
  const int m = 2 * n;
  const long double L = std::sqrt(static_cast<long double>(n) / std::sqrt(2.0L));
  tab.L = static_cast<double>(L);
  const long double pi = std::numbers::pi_v<long double>;
  std::vector<long double> F(2 * m);
  for (int k = -m + 1; k <= m - 1; ++k) {
    const long double t = L * std::tan(k * pi / (2 * m));
    F[k + m] = std::exp(-t * t) * (L * L + t * t);
  }
  for (int j = 1; j <= n; ++j) {
    long double acc = 0.0L;
    for (int k = -m + 1; k <= m - 1; ++k) {
      acc += F[k + m] * std::cos(2 * pi * j * k / (2 * m));
    }
    tab.a[j] = static_cast<double>(acc / (2 * m));
  }
  return tab;
}

const WeidemanTable& weideman_table() {
  static const WeidemanTable tab = make_weideman_table();
  return tab;
}

// Upper half plane only.
Complex faddeeva_upper(Complex z) {
  constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  const Complex i{0.0, 1.0};
  if (std::abs(z) >= kContinuedFractionRadius) {
    Complex t{0.0, 0.0};
    for (int k = kContinuedFractionDepth; k >= 1; --k) {
      t = (0.5 * k) / (z - t);
    }
    return i * inv_sqrt_pi / (z - t);
  }
  const auto& tab = weideman_table();
  const Complex denom = tab.L - i * z;
  const Complex Z = (tab.L + i * z) / denom;
  Complex p{0.0, 0.0};
  for (int j = kWeidemanTerms; j >= 1; --j) p = p * Z + tab.a[j];
  return 2.0 * p / (denom * denom) + inv_sqrt_pi / denom;
}

Complex clamp_exp(Complex exponent, bool& saturated) {
  if (exponent.real() > kExpOverflow) {
    saturated = true;
    return std::polar(DBL_MAX, exponent.imag());
  }
  return std::exp(exponent);
}

}  // namespace

Complex faddeeva_w(Complex z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  bool saturated = false;
  return 2.0 * clamp_exp(-z * z, saturated) - faddeeva_upper(-z);
}

SpecialValue erfc_complex_flagged(Complex z) {
  require(std::isfinite(z.real()) && std::isfinite(z.imag()),
          "erfc_complex: argument must be finite");
  const Complex i{0.0, 1.0};
  if (z.real() >= 0.0) {
    // erfc(z) = exp(-z^2) w(iz); iz lies in the closed upper half plane.
    SpecialValue out;
    const Complex w = faddeeva_upper(i * z);
    out.value = clamp_exp(-z * z, out.saturated) * w;
    return out;
  }
  SpecialValue mirrored = erfc_complex_flagged(-z);
  mirrored.value = 2.0 - mirrored.value;
  return mirrored;
}

Complex erfc_complex(Complex z) { return erfc_complex_flagged(z).value; }

Complex erf_complex(Complex z) {
  if (std::abs(z) < 0.5) {
    // Maclaurin series; 1 - erfc(z) would lose relative accuracy here.
    const Complex z2 = z * z;
    Complex term = z;
    Complex sum = z;
    for (int n = 1; n < 30; ++n) {
      term *= -z2 / static_cast<double>(n);
      const Complex next = term / static_cast<double>(2 * n + 1);
      sum += next;
      if (std::abs(next) < 1e-17 * std::abs(sum)) break;
    }
    return 2.0 * std::numbers::inv_sqrtpi * sum;
  }
  return 1.0 - erfc_complex(z);
}

double erfcx(double x) {
  if (x >= 0.0) return faddeeva_upper(Complex{0.0, x}).real();
  return 2.0 * std::exp(x * x) - faddeeva_upper(Complex{0.0, -x}).real();
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 10/21
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452200, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes kXgk[1], kXgk[3], ...
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  Complex value;
  double error;
  bool at_floor;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.error < y.error;
  }
};

Panel gk21(const ComplexIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = f(center);
  Complex kronrod = kWgk[10] * fc;
  Complex gauss{0.0, 0.0};
  double abs_sum = kWgk[10] * std::abs(fc);
  std::array<Complex, 10> f1{};
  std::array<Complex, 10> f2{};
  for (int k = 0; k < 10; ++k) {
    const double dx = half * kXgk[k];
    f1[k] = f(center - dx);
    f2[k] = f(center + dx);
    const Complex pair = f1[k] + f2[k];
    kronrod += kWgk[k] * pair;
    abs_sum += kWgk[k] * (std::abs(f1[k]) + std::abs(f2[k]));
    if (k % 2 == 1) gauss += kWg[k / 2] * pair;
  }
  const Complex mean = 0.5 * kronrod;
  double asc = kWgk[10] * std::abs(fc - mean);
  for (int k = 0; k < 10; ++k) {
    asc += kWgk[k] * (std::abs(f1[k] - mean) + std::abs(f2[k] - mean));
  }
  const double abs_half = std::abs(half);
  asc *= abs_half;
  abs_sum *= abs_half;

  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  const double floor = 50.0 * DBL_EPSILON * abs_sum;
  bool at_floor = false;
  if (floor > err || err <= DBL_MIN) {
    err = std::max(err, floor);
    at_floor = true;
  }
  return {a, b, kronrod * half, err, at_floor};
}

}  // namespace

QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a,
                                    double b, const QuadratureOptions& opts) {
  require(opts.abs_tol > 0.0 || opts.rel_tol > 0.0,
          "integrate_adaptive: tolerance must be positive");
  require(std::isfinite(a) && std::isfinite(b),
          "integrate_adaptive: finite limits required; use the mapped forms");
  QuadratureResult out;
  if (a == b) return out;

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> open;
  std::vector<Panel> settled;
  open.push(gk21(f, a, b));
  out.evaluations = 21;

  auto totals = [&](Complex& value, double& error) {
    CompensatedSum<Complex> v;
    CompensatedSum<double> e;
    auto copy = open;
    while (!copy.empty()) {
      v.add(copy.top().value);
      e.add(copy.top().error);
      copy.pop();
    }
    for (const auto& p : settled) {
      v.add(p.value);
      e.add(p.error);
    }
    value = v.value();
    error = e.value();
  };

  // Running totals avoid re-summing the heap each iteration; a final exact
  // compensated pass fixes drift.
  Complex value = open.top().value;
  double error = open.top().error;
  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    if (error <= target) break;
    if (open.empty()) {
      out.converged = false;
      break;
    }
    Panel worst = open.top();
    open.pop();
    if (worst.at_floor) {
      settled.push_back(worst);
      continue;
    }
    if (out.subdivisions >= opts.max_subdivisions) {
      open.push(worst);
      totals(value, error);
      throw QuadratureError("integrate_adaptive: no convergence after " +
                                std::to_string(opts.max_subdivisions) +
                                " subdivisions",
                            value.real(), value.imag(), error);
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    out.evaluations += 42;
    ++out.subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
      totals(value, error);
    }
  }
  totals(value, error);
  out.value = value;
  out.error_estimate = error;
  if (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    out.converged = false;
  }
  return out;
}

QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a,
                                    double b, double tol) {
  QuadratureOptions opts;
  opts.abs_tol = tol;
  opts.rel_tol = tol;
  return integrate_adaptive(f, a, b, opts);
}

QuadratureResult integrate_to_infinity(const ComplexIntegrand& f, double a,
                                       const QuadratureOptions& opts) {
  auto mapped = [&](double t) -> Complex {
    if (t >= 1.0) return {0.0, 0.0};
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, opts);
}

QuadratureResult integrate_real_line(const ComplexIntegrand& f,
                                     const QuadratureOptions& opts) {
  auto mapped = [&](double t) -> Complex {
    const double s = 1.0 - t * t;
    if (s <= 0.0) return {0.0, 0.0};
    return f(t / s) * ((1.0 + t * t) / (s * s));
  };
  return integrate_adaptive(mapped, -1.0, 1.0, opts);
}

// ---------------------------------------------------------------------------
// Threads
// ---------------------------------------------------------------------------

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
  const unsigned cap = g_max_threads.load();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace clockback
