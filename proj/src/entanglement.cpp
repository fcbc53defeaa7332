#include "clockback/entanglement.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "clockback/error.hpp"

namespace clockback {

void SystemSpec::validate() const {
  require(!eigenvalues.empty(), "system needs at least one eigenvalue");
  require(eigenvalues.size() == amplitudes.size(),
          "system eigenvalues and amplitudes differ in length");
  CompensatedSum<double> total;
  std::set<double> seen;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    require(std::isfinite(eigenvalues[i]) && eigenvalues[i] != 0.0,
            "system eigenvalues must be finite and nonzero");
    require(seen.insert(eigenvalues[i]).second, "system eigenvalues must be distinct");
    total.add(std::norm(amplitudes[i]));
  }
  require(std::abs(total.value() - 1.0) <= 1e-12,
          "system amplitudes must satisfy sum |C|^2 = 1");
}

void ClockMomentumState::validate() const {
  require(std::isfinite(mean_k) && mean_k > 0.0, "clock mean_k must be positive");
  require(std::isfinite(sigma_k) && sigma_k > 0.0, "clock sigma_k must be positive");
  require(mean_k >= 5.0 * sigma_k, "clock state needs mean_k >= 5 sigma_k");
  require(std::isfinite(offset), "clock offset must be finite");
}

namespace {

double log_normalizer(const ClockMomentumState& c) {
  // int_0^inf exp(-(k - m)^2 / (2 s^2)) dk
  const double n = c.sigma_k * std::sqrt(0.5 * std::numbers::pi) *
                   std::erfc(-c.mean_k / (c.sigma_k * std::numbers::sqrt2));
  return std::log(n);
}

// log |phi_C(k)|^2 for k > 0.
double log_density(const ClockMomentumState& c, double k) {
  const double d = (k - c.mean_k) / c.sigma_k;
  return -0.5 * d * d - log_normalizer(c);
}

}  // namespace

double ClockMomentumState::density(double k) const {
  if (k <= 0.0) return 0.0;
  return std::exp(log_density(*this, k));
}

Complex ClockMomentumState::amplitude(double k) const {
  if (k <= 0.0) return {0.0, 0.0};
  return std::polar(std::exp(0.5 * log_density(*this, k)), -k * offset);
}

std::pair<double, double> ClockMomentumState::support() const {
  return {std::max(0.0, mean_k - 12.0 * sigma_k), mean_k + 12.0 * sigma_k};
}

double postselection_rate(double j, double P0, double mass) {
  return std::abs(P0 / j) / mass;
}

Overlap postselected_clock_overlap(double j, double j2, double P0,
                                   const ClockMomentumState& clock, double mass,
                                   double tol) {
  clock.validate();
  require(j != 0.0 && j2 != 0.0, "eigenvalues must be nonzero");
  require(std::isfinite(P0) && P0 != 0.0, "post-selected pointer value P0 must be nonzero");
  require(mass > 0.0, "clock mass must be positive");
  Overlap out;
  if (P0 * j <= 0.0 || P0 * j2 <= 0.0) {
    out.value = {0.0, 0.0};
    out.branch_excluded = true;
    return out;
  }
  const double rate = postselection_rate(j, P0, mass) + postselection_rate(j2, P0, mass);
  const double log_norm = log_normalizer(clock);
  const double s = clock.sigma_k;
  // Integrand peak after completing the square.
  const double peak = clock.mean_k - s * s * rate;
  const double lo = std::max(0.0, peak - 12.0 * s);
  const double hi = std::max(peak, 0.0) + 12.0 * s;
  auto integrand = [&](double k) -> Complex {
    const double d = (k - clock.mean_k) / s;
    return {std::exp(-k * rate - 0.5 * d * d - log_norm), 0.0};
  };
  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = 1e-300;
  out.value = integrate_adaptive(integrand, lo, hi, opts).value;
  return out;
}

Complex DensityMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double DensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return worst;
}

double DensityMatrix::min_eigenvalue() const {
  require(n_ > 0, "empty matrix has no eigenvalues");
  Eigen::MatrixXcd m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  require(n_ > 0, "density matrix is empty");
  require(hermiticity_defect() <= 1e-12, "density matrix is not Hermitian");
  require(std::abs(trace() - 1.0) <= 1e-12, "density matrix trace differs from 1");
  require(min_eigenvalue() >= -1e-10, "density matrix is not positive semidefinite");
}

double purity(const DensityMatrix& rho) {
  CompensatedSum<double> s;
  const std::size_t n = rho.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s.add((rho(i, j) * rho(j, i)).real());
  }
  return s.value();
}

DensityMatrix gram_matrix(const std::vector<double>& eigenvalues, double P0,
                          const ClockMomentumState& clock, double mass, double tol) {
  const std::size_t n = eigenvalues.size();
  DensityMatrix g(n);
  std::vector<std::pair<std::size_t, std::size_t>> upper;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) upper.emplace_back(a, b);
  }
  parallel_for(upper.size(), [&](std::size_t idx) {
    const auto [a, b] = upper[idx];
    const Complex v =
        postselected_clock_overlap(eigenvalues[a], eigenvalues[b], P0, clock, mass, tol).value;
    g(a, b) = v;
    g(b, a) = std::conj(v);
  });
  return g;
}

PostSelection post_select(const SystemSpec& system, double P0,
                          const ClockMomentumState& clock, double mass, double tol) {
  system.validate();
  clock.validate();
  require(std::isfinite(P0) && P0 != 0.0, "post-selected pointer value P0 must be nonzero");
  PostSelection out;
  for (std::size_t i = 0; i < system.eigenvalues.size(); ++i) {
    if (system.eigenvalues[i] * P0 > 0.0) {
      out.eigenvalues.push_back(system.eigenvalues[i]);
      out.amplitudes.push_back(system.amplitudes[i]);
    }
  }
  require(!out.eigenvalues.empty(), "post-selection has zero probability",
          ErrorCode::kZeroProbability);
  const std::size_t n = out.eigenvalues.size();
  out.gram = gram_matrix(out.eigenvalues, P0, clock, mass, tol);

  DensityMatrix rho(n);
  CompensatedSum<double> weight;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      rho(i, k) = out.amplitudes[i] * std::conj(out.amplitudes[k]) * out.gram(k, i);
    }
    weight.add(rho(i, i).real());
  }
  out.branch_probability = weight.value();
  require(out.branch_probability > 0.0, "post-selection has zero probability",
          ErrorCode::kZeroProbability);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) rho(i, k) /= out.branch_probability;
  }
  // Restore exact Hermiticity lost to rounding.
  for (std::size_t i = 0; i < n; ++i) {
    rho(i, i) = {rho(i, i).real(), 0.0};
    for (std::size_t k = i + 1; k < n; ++k) rho(k, i) = std::conj(rho(i, k));
  }
  out.rho = std::move(rho);
  out.purity = purity(out.rho);
  return out;
}

DensityMatrix reduced_density_matrix(const SystemSpec& system, double P0,
                                     const ClockMomentumState& clock, double mass) {
  return post_select(system, P0, clock, mass).rho;
}

double branch_probability(const SystemSpec& system, int p0_sign,
                          const ClockMomentumState& clock, double mass, double P0) {
  system.validate();
  require(p0_sign == 1 || p0_sign == -1, "P0 sign must be +1 or -1");
  const double p = p0_sign * std::abs(P0);
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < system.eigenvalues.size(); ++i) {
    const double j = system.eigenvalues[i];
    if (j * p0_sign <= 0.0) continue;
    const double self =
        p == 0.0 ? 1.0 : postselected_clock_overlap(j, j, p, clock, mass).value.real();
    total.add(std::norm(system.amplitudes[i]) * self);
  }
  return total.value();
}

std::vector<Complex> conditional_system_state(const SystemSpec& system, double P0,
                                              const ClockMomentumState& clock, double mass,
                                              const ClockMomentumState& probe) {
  system.validate();
  clock.validate();
  probe.validate();
  require(std::isfinite(P0) && P0 != 0.0, "post-selected pointer value P0 must be nonzero");
  std::vector<Complex> out;
  const auto [clo, chi] = clock.support();
  const auto [plo, phi] = probe.support();
  const double lo = std::max(clo, plo);
  const double hi = std::min(chi, phi);
  for (std::size_t i = 0; i < system.eigenvalues.size(); ++i) {
    const double j = system.eigenvalues[i];
    if (j * P0 <= 0.0) continue;
    Complex proj{0.0, 0.0};
    if (lo < hi) {
      const double rate = postselection_rate(j, P0, mass);
      auto integrand = [&](double k) -> Complex {
        return std::conj(probe.amplitude(k)) * std::exp(-k * rate) * clock.amplitude(k);
      };
      QuadratureOptions opts;
      opts.rel_tol = kOverlapTol;
      opts.abs_tol = 1e-300;
      proj = integrate_adaptive(integrand, lo, hi, opts).value;
    }
    out.push_back(system.amplitudes[i] * proj);
  }
  return out;
}

}  // namespace clockback
