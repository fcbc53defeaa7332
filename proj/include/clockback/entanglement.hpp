#pragma once

#include <cstddef>
#include <vector>

#include "clockback/numerics.hpp"

namespace clockback {

/// Measured observable: eigenvalues j_i with amplitudes C_i = <j_i|S>.
struct SystemSpec {
  std::vector<double> eigenvalues;
  std::vector<Complex> amplitudes;

  /// Sum |C|^2 = 1 to 1e-12, distinct nonzero eigenvalues.
  void validate() const;
};

/// Gaussian clock momentum wavefunction phi_C(k) ~ exp(-(k - mean)^2 / (4 sigma^2)),
/// normalized on k > 0. Requires mean_k >= 5 sigma_k.
struct ClockMomentumState {
  double mean_k = 1.0;
  double sigma_k = 0.1;
  // Position offset x0 of the packet, phi(k) -> phi(k) exp(-i k x0). The
  // post-selected clock states only use the default x0 = 0.
  double offset = 0.0;

  void validate() const;
  /// |phi_C(k)|^2, zero for k <= 0.
  double density(double k) const;
  Complex amplitude(double k) const;
  /// Support window [lo, hi] outside which the density is below exp(-72).
  std::pair<double, double> support() const;
};

struct Overlap {
  Complex value;
  bool branch_excluded = false;  // theta(P0 j) theta(P0 j2) == 0
};

/// Default tolerance for the post-selected clock-state overlaps.
inline constexpr double kOverlapTol = 1e-10;

/// Damping rate |P0 / j| / M of the post-selected clock state |phi_j>.
double postselection_rate(double j, double P0, double mass);

/// <phi_j|phi_j2> = int dk exp(-(k/M)(|P0/j| + |P0/j2|)) |phi_C(k)|^2. Returns
/// exactly zero with branch_excluded set when either eigenvalue lies on the
/// other pointer branch.
Overlap postselected_clock_overlap(double j, double j2, double P0,
                                   const ClockMomentumState& clock, double mass,
                                   double tol = kOverlapTol);

/// Square complex matrix, row-major.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(std::size_t n) : n_(n), entries_(n * n) {}

  std::size_t dimension() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  Complex trace() const;
  double hermiticity_defect() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;
  /// Hermitian to 1e-12, unit trace to 1e-12, min eigenvalue >= -1e-10.
  void validate() const;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> entries_;
};

/// Tr(rho^2).
double purity(const DensityMatrix& rho);

/// Gram matrix <phi_{j_a}|phi_{j_b}> of the post-selected clock states.
DensityMatrix gram_matrix(const std::vector<double>& eigenvalues, double P0,
                          const ClockMomentumState& clock, double mass,
                          double tol = kOverlapTol);

struct PostSelection {
  std::vector<double> eigenvalues;   // branch members, input order
  std::vector<Complex> amplitudes;
  DensityMatrix gram;
  DensityMatrix rho;
  double purity = 0.0;
  double branch_probability = 0.0;
};

/// Eigenvalues with theta(P0 j) = 1, their Gram matrix and the renormalized
/// reduced state rho_{ii'} = C_i conj(C_i') <phi_{j_i'}|phi_{j_i}>.
/// Throws kZeroProbability when the branch is empty.
PostSelection post_select(const SystemSpec& system, double P0,
                          const ClockMomentumState& clock, double mass,
                          double tol = kOverlapTol);

DensityMatrix reduced_density_matrix(const SystemSpec& system, double P0,
                                     const ClockMomentumState& clock, double mass);

/// Unnormalized weight sum_branch |C_i|^2 <phi_i|phi_i> of the pointer branch
/// with sign p0_sign, evaluated at |P0|.
double branch_probability(const SystemSpec& system, int p0_sign,
                          const ClockMomentumState& clock, double mass, double P0);

/// Conditional system amplitudes C_i <xi|phi_{j_i}> after additionally
/// projecting the clock on |xi>, one entry per branch eigenvalue.
std::vector<Complex> conditional_system_state(const SystemSpec& system, double P0,
                                              const ClockMomentumState& clock, double mass,
                                              const ClockMomentumState& probe);

}  // namespace clockback
