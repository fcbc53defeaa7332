#include "clockback/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clockback/error.hpp"
#include "clockback/scattering.hpp"

namespace clockback {

void PointerSpec::validate() const {
  require(std::isfinite(resolution) && resolution > 0.0,
          "pointer resolution Delta must be positive");
}

double PointerSpec::initial_wavefunction(double Q) const {
  return std::exp(-0.25 * Q * Q * resolution * resolution);
}

std::vector<double> PointerWavefunction::density() const {
  std::vector<double> d(amplitudes.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(amplitudes[i]) / norm;
  return d;
}

double closed_form_prefactor(double alpha) { return std::numbers::pi / std::abs(alpha); }

double closed_form_shape(double P, double alpha, double Delta) {
  require(alpha != 0.0, "closed form undefined at alpha = 0: use free Gaussian",
          ErrorCode::kDomain);
  require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
  if (alpha < 0.0) return closed_form_shape(-P, -alpha, Delta);
  const double x = Delta / (2.0 * alpha) - P / Delta;
  if (x >= 0.0) {
    // erfc(x) exp(-P/alpha + Delta^2/4alpha^2) == erfcx(x) exp(-P^2/Delta^2)
    return erfcx(x) * std::exp(-(P * P) / (Delta * Delta));
  }
  const double exponent = -P / alpha + Delta * Delta / (4.0 * alpha * alpha);
  return erfc_complex(Complex{x, 0.0}).real() * std::exp(exponent);
}

Complex final_pointer_closedform(double P, double alpha, double Delta) {
  return {closed_form_prefactor(alpha) * closed_form_shape(P, alpha, Delta), 0.0};
}

Complex final_pointer_quadrature(double P, double alpha, double Delta, double tol) {
  require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
  require(tol > 0.0, "quadrature tolerance must be positive");
  const double cutoff = 12.0 / Delta;
  const double d2 = 0.25 * Delta * Delta;
  auto integrand = [=](double Q) -> Complex {
    const Complex phase = std::polar(std::exp(-d2 * Q * Q), Q * P);
    return phase / Complex{1.0, alpha * Q};
  };
  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-10 * std::sqrt(std::numbers::pi) / Delta;
  opts.max_subdivisions = 20000;
  return integrate_adaptive(integrand, -cutoff, cutoff, opts).value;
}

double calibrate_prefactor(double alpha, double Delta, std::span<const double> grid,
                           double tol) {
  require(!grid.empty(), "calibration grid is empty");
  CompensatedSum<double> num;
  CompensatedSum<double> den;
  for (double P : grid) {
    const double shape = closed_form_shape(P, alpha, Delta);
    const Complex oracle = final_pointer_quadrature(P, alpha, Delta, tol);
    num.add(shape * oracle.real());
    den.add(shape * shape);
  }
  require(den.value() > 0.0, "calibration grid misses the pointer distribution",
          ErrorCode::kGridTooNarrow);
  return num.value() / den.value();
}

PointerMoments distribution_moments(std::span<const double> grid,
                                    std::span<const double> density, double* norm_out) {
  require(grid.size() == density.size() && grid.size() >= 3,
          "moments need matching grid and density with >= 3 points");
  const std::size_t n = grid.size();
  auto trapezoid = [&](auto&& weight) {
    CompensatedSum<double> s;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = grid[i + 1] - grid[i];
      s.add(0.5 * h * (weight(i) * density[i] + weight(i + 1) * density[i + 1]));
    }
    return s.value();
  };
  const double norm = trapezoid([](std::size_t) { return 1.0; });
  require(norm > 0.0, "distribution has zero norm", ErrorCode::kZeroProbability);
  const double mean = trapezoid([&](std::size_t i) { return grid[i]; }) / norm;
  const double var =
      trapezoid([&](std::size_t i) { return (grid[i] - mean) * (grid[i] - mean); }) / norm;
  const double third = trapezoid([&](std::size_t i) {
                         const double d = grid[i] - mean;
                         return d * d * d;
                       }) /
                       norm;
  if (norm_out) *norm_out = norm;
  PointerMoments m;
  m.mean = mean;
  m.std = std::sqrt(var);
  m.skewness = var > 0.0 ? third / (var * m.std) : 0.0;
  return m;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

void check_grid(std::span<const double> grid) {
  require(grid.size() >= 16, "pointer grid needs at least 16 points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    require(grid[i + 1] > grid[i], "pointer grid must be strictly increasing");
  }
}

}  // namespace

std::vector<double> default_pointer_grid(double alpha, double Delta, std::size_t points) {
  require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
  require(points >= 16, "pointer grid needs at least 16 points");
  // Pilot window: Gaussian side 8 Delta, exponential side 40 |alpha|.
  const double a = std::abs(alpha);
  double lo = -8.0 * Delta;
  double hi = 8.0 * Delta + 40.0 * a;
  if (alpha < 0.0) std::tie(lo, hi) = std::pair{-hi, -lo};
  const auto pilot = pointer_distribution(alpha, Delta, linspace(lo, hi, 4096));
  const double mean = pilot.moments.mean;
  const double sd = pilot.moments.std;
  // The exp(-2P/alpha) tail outlives 10 std once alpha is comparable to Delta.
  const double tail = std::max(10.0 * sd, 12.0 * a);
  if (alpha < 0.0) return linspace(mean - tail, mean + 10.0 * sd, points);
  return linspace(mean - 10.0 * sd, mean + tail, points);
}

PointerWavefunction pointer_distribution(double alpha, double Delta,
                                         std::span<const double> grid, PointerMethod method) {
  require(std::isfinite(alpha), "alpha must be finite");
  require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
  check_grid(grid);

  PointerWavefunction out;
  out.grid.assign(grid.begin(), grid.end());
  out.amplitudes.resize(grid.size());
  const bool closed = method == PointerMethod::kClosedForm && alpha != 0.0;
  parallel_for(grid.size(), [&](std::size_t i) {
    out.amplitudes[i] = closed ? final_pointer_closedform(grid[i], alpha, Delta)
                               : final_pointer_quadrature(grid[i], alpha, Delta);
  });

  std::vector<double> abs2(grid.size());
  for (std::size_t i = 0; i < abs2.size(); ++i) abs2[i] = std::norm(out.amplitudes[i]);
  out.moments = distribution_moments(out.grid, abs2, &out.norm);

  // Probability carried by the outer 2% of the points on each side.
  const std::size_t edge = std::max<std::size_t>(1, grid.size() / 50);
  const std::size_t n = grid.size();
  auto mass = [&](std::size_t first, std::size_t last) {
    CompensatedSum<double> s;
    for (std::size_t i = first; i < last; ++i) {
      s.add(0.5 * (grid[i + 1] - grid[i]) * (abs2[i] + abs2[i + 1]));
    }
    return s.value() / out.norm;
  };
  const double left = mass(0, edge);
  const double right = mass(n - 1 - edge, n - 1);
  if (left >= 1e-3 || right >= 1e-3) {
    throw Error(ErrorCode::kGridTooNarrow,
                "pointer grid too narrow: edge probability " +
                    std::to_string(std::max(left, right)));
  }
  return out;
}

WeakShift weak_limit_shift(double k, double lambda, double j, double mass, double Delta) {
  require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
  WeakShift w;
  w.shift = alpha(k, lambda, j, mass);
  w.alpha_over_delta = std::abs(w.shift) / Delta;
  w.weak = w.alpha_over_delta <= kWeakAlphaOverDelta;
  return w;
}

}  // namespace clockback
