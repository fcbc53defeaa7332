#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clockback/entanglement.hpp"
#include "clockback/error.hpp"

using namespace clockback;

namespace {

ClockMomentumState state(double mean = 10.0, double sigma = 1.0) {
  ClockMomentumState s;
  s.mean_k = mean;
  s.sigma_k = sigma;
  return s;
}

SystemSpec two_level(double j1, double j2) {
  SystemSpec s;
  s.eigenvalues = {j1, j2};
  const double h = std::sqrt(0.5);
  s.amplitudes = {{h, 0.0}, {h, 0.0}};
  return s;
}

// exp(-c k) averaged over the k > 0 truncated Gaussian.
double laplace(double m, double s, double c) {
  const double r = std::numbers::sqrt2 * s;
  return std::exp(-c * m + 0.5 * c * c * s * s) * std::erfc(-(m - c * s * s) / r) /
         std::erfc(-m / r);
}

}  // namespace

TEST_CASE("momentum state is normalized on k > 0") {
  const auto s = state(3.0, 0.5);
  const auto r = integrate_adaptive([&](double k) { return Complex{s.density(k), 0.0}; }, 0.0,
                                    10.0, 1e-13);
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.density(-1.0) == 0.0);
  ClockMomentumState bad = state(1.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("self overlap is real and positive") {
  const auto o = postselected_clock_overlap(1.5, 1.5, 0.7, state(), 1.0);
  CHECK(o.value.real() > 0.0);
  CHECK(o.value.imag() == 0.0);
  CHECK_FALSE(o.branch_excluded);
}

TEST_CASE("overlap tends to one as P0 vanishes") {
  for (auto [j, j2] : {std::pair{1.0, 2.0}, std::pair{-1.0, -3.0}}) {
    const double p0 = j > 0 ? 1e-12 : -1e-12;
    CHECK(postselected_clock_overlap(j, j2, p0, state(), 1.0).value.real() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("overlap frozen values") {
  // 40-digit quadrature of the truncated-Gaussian integral.
  const auto s = state();
  CHECK(postselected_clock_overlap(1, 1, 1, s, 1).value.real() ==
        doctest::Approx(1.5229979744712619e-8).epsilon(1e-10));
  CHECK(postselected_clock_overlap(1, 2, 1, s, 1).value.real() ==
        doctest::Approx(9.4224548173284749e-7).epsilon(1e-10));
  CHECK(postselected_clock_overlap(2, 2, 1, s, 1).value.real() ==
        doctest::Approx(7.4851829887700591e-5).epsilon(1e-10));
}

TEST_CASE("overlap against the analytic Laplace transform") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pu(0.05, 3.0);
  std::uniform_real_distribution<double> ju(0.5, 4.0);
  std::uniform_real_distribution<double> mu(0.5, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double P0 = pu(rng), j = ju(rng), j2 = ju(rng), M = mu(rng);
    const double got = postselected_clock_overlap(j, j2, P0, state(), M).value.real();
    const double want = laplace(10.0, 1.0, (P0 / j + P0 / j2) / M);
    CHECK(std::abs(got - want) <= 1e-9 * want);
  }
}

TEST_CASE("opposite-sign eigenvalues are excluded from the branch") {
  const auto o = postselected_clock_overlap(1.0, -1.0, 1.0, state(), 1.0);
  CHECK(o.branch_excluded);
  CHECK(o.value == Complex{0.0, 0.0});
}

TEST_CASE("purity of reference matrices") {
  DensityMatrix pure(2);
  const double h = 0.5;
  pure(0, 0) = h;
  pure(0, 1) = h;
  pure(1, 0) = h;
  pure(1, 1) = h;
  CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-15));
  DensityMatrix mixed(2);
  mixed(0, 0) = 0.5;
  mixed(1, 1) = 0.5;
  CHECK(purity(mixed) == doctest::Approx(0.5).epsilon(1e-15));
  DensityMatrix bad(2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("single branch member gives a pure state") {
  const auto rho = reduced_density_matrix(two_level(1.0, -1.0), 1.0, state(), 1.0);
  REQUIRE(rho.dimension() == 1);
  CHECK(rho(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-eigenvalue branch stays mixed") {
  const auto sel = post_select(two_level(1.0, 2.0), 1.0, state(), 1.0);
  REQUIRE(sel.rho.dimension() == 2);
  CHECK(sel.gram(0, 1).real() > 0.0);
  CHECK(std::abs(sel.rho(0, 1)) > 0.0);
  CHECK(std::abs(sel.rho(0, 1)) < 0.5);
  CHECK(sel.purity > 0.5);
  CHECK(sel.purity < 1.0);
  CHECK(sel.purity == doctest::Approx(0.99991002253107293).epsilon(1e-10));
  CHECK(sel.rho(0, 1).real() == doctest::Approx(0.012585581474698291).epsilon(1e-9));
  CHECK(sel.branch_probability == doctest::Approx(3.7433529933722652e-5).epsilon(1e-9));
  CHECK(sel.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sel.rho.hermiticity_defect() == 0.0);
  CHECK(sel.rho.min_eigenvalue() >= -1e-14);
}

TEST_CASE("random systems give valid density matrices") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    SystemSpec s;
    double norm = 0.0;
    for (int i = 0; i < 4; ++i) {
      s.eigenvalues.push_back(0.5 + i + 0.1 * t);
      s.amplitudes.emplace_back(u(rng), u(rng));
      norm += std::norm(s.amplitudes.back());
    }
    for (auto& a : s.amplitudes) a /= std::sqrt(norm);
    const auto sel = post_select(s, 0.3, state(5.0, 0.5), 1.0);
    CHECK(sel.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sel.rho.min_eigenvalue() >= -1e-12);
    CHECK(sel.purity <= 1.0 + 1e-12);
    CHECK(sel.purity >= 0.25 - 1e-12);
  }
}

TEST_CASE("branch probabilities") {
  SystemSpec all_pos = two_level(1.0, 2.0);
  CHECK(branch_probability(all_pos, 1, state(), 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(branch_probability(all_pos, -1, state(), 1.0, 1.0) == 0.0);
  SystemSpec sym = two_level(1.0, -1.0);
  CHECK(branch_probability(sym, 1, state(), 1.0, 0.4) ==
        doctest::Approx(branch_probability(sym, -1, state(), 1.0, 0.4)).epsilon(1e-14));
}

TEST_CASE("post-selection on an empty branch") {
  try {
    post_select(two_level(1.0, 2.0), -1.0, state(), 1.0);
    FAIL("expected zero probability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kZeroProbability);
  }
}

TEST_CASE("system validation") {
  SystemSpec s = two_level(1.0, 1.0);
  CHECK_THROWS_AS(s.validate(), Error);
  s = two_level(1.0, 2.0);
  s.amplitudes[0] = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("conditional state for a matching probe") {
  const auto s = two_level(1.0, 2.0);
  const auto st = state();
  const auto psi = conditional_system_state(s, 0.2, st, 1.0, st);
  REQUIRE(psi.size() == 2);
  const double h = std::sqrt(0.5);
  CHECK(std::abs(psi[0] / h) ==
        doctest::Approx(laplace(10.0, 1.0, 0.2)).epsilon(1e-8));
}
