#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "clockback/error.hpp"
#include "clockback/numerics.hpp"

using namespace clockback;

namespace {

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("erfc at zero and real one") {
  CHECK(erfc_complex({0.0, 0.0}) == Complex{1.0, 0.0});
  CHECK(std::abs(erfc_complex({1.0, 0.0}).real() - 0.1572992070502851) <= 1e-15);
  CHECK(erfc_complex({1.0, 0.0}).imag() == doctest::Approx(0.0));
}

TEST_CASE("erfc frozen complex values") {
  // 40-digit reference evaluations.
  struct Row {
    Complex z, want;
  };
  const Row rows[] = {
      {{0.7, 0.3}, {0.27730449983596513, -0.20739557153081302}},
      {{2.0, -1.0}, {-0.0036063427256517509, -0.011259006028815025}},
      {{-1.0, 2.0}, {0.46335643422143497, 5.0491437034470347}},
      {{5.0, 0.5}, {7.3572077658981947e-13, 1.8224380770767701e-12}},
      {{0.1, 0.0}, {0.8875370839817151, 0.0}},
      {{3.0, 3.0}, {0.13217350242454886, 0.012152181790312257}},
      {{-2.5, -0.5}, {2.0004602414355216, 0.00023181971990980711}},
      {{10.0, 1.0}, {1.7860120922653745e-45, -5.359995110846678e-45}},
  };
  for (const auto& r : rows) {
    CAPTURE(r.z);
    CHECK(rel(erfc_complex(r.z), r.want) < 1e-12);
  }
}

TEST_CASE("faddeeva frozen values") {
  CHECK(rel(faddeeva_w({1.0, 1.0}), {0.30474420525691259, 0.20821893820283163}) < 1e-13);
  CHECK(rel(faddeeva_w({0.5, 2.0}), {0.24527599022635851, 0.051521478343635849}) < 1e-13);
  CHECK(rel(faddeeva_w({-3.0, 0.2}), {0.015626770455552117, -0.1996685632186661}) < 1e-13);
  CHECK(rel(faddeeva_w({12.0, 0.5}), {0.0019762436764948046, 0.04709755696226781}) < 1e-13);
}

TEST_CASE("erfc reflection and conjugation symmetry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const Complex z{u(rng), u(rng)};
    const Complex a = erfc_complex(z);
    const Complex b = erfc_complex(-z);
    CAPTURE(z);
    CHECK(std::abs(a + b - 2.0) <= 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(erfc_complex(std::conj(z)) - std::conj(a)) <= 1e-13 * std::abs(a) + 1e-300);
  }
  const Complex z{0.7, 0.3};
  CHECK(std::abs(erfc_complex(-z) - (2.0 - erfc_complex(z))) < 1e-15);
}

TEST_CASE("erfc agrees with std::erfc on the real line") {
  for (double x = -6.0; x <= 26.0; x += 0.37) {
    CAPTURE(x);
    const double want = std::erfc(x);
    CHECK(std::abs(erfc_complex({x, 0.0}).real() - want) <= 1e-13 * want);
  }
}

TEST_CASE("erf small argument keeps relative accuracy") {
  const Complex z{1e-6, 2e-6};
  const Complex want = 2.0 / std::sqrt(std::numbers::pi) * z;
  CHECK(rel(erf_complex(z), want) < 1e-10);
}

TEST_CASE("erfc overflow is flagged") {
  const auto v = erfc_complex_flagged({0.0, 30.0});
  CHECK(v.saturated);
  CHECK(std::isfinite(v.value.real()));
  CHECK_FALSE(erfc_complex_flagged({1.0, 1.0}).saturated);
}

TEST_CASE("erfcx") {
  CHECK(erfcx(0.0) == doctest::Approx(1.0));
  for (double x : {-3.0, -0.5, 0.3, 2.0, 10.0, 25.0}) {
    CAPTURE(x);
    const double want = std::exp(x * x) * std::erfc(x);
    CHECK(std::abs(erfcx(x) - want) <= 1e-12 * want);
  }
  // Large-x asymptote 1 / (x sqrt(pi)).
  const double x = 1e6;
  CHECK(erfcx(x) * x * std::sqrt(std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("quadrature elementary integrals") {
  const auto one = integrate_adaptive([](double) { return Complex{1.0, 0.0}; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(one.value - 1.0) < 1e-14);
  const auto period = integrate_adaptive(
      [](double x) { return std::exp(Complex{0.0, x}); }, 0.0, 2.0 * std::numbers::pi, 1e-12);
  CHECK(std::abs(period.value) < 1e-12);
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-13;
  const auto gauss = integrate_real_line([](double x) { return Complex{std::exp(-x * x), 0.0}; }, o);
  CHECK(std::abs(gauss.value.real() - std::sqrt(std::numbers::pi)) < 1e-12);
  const auto tail = integrate_to_infinity([](double x) { return Complex{std::exp(-x), 0.0}; }, 1.0, o);
  CHECK(std::abs(tail.value.real() - std::exp(-1.0)) < 1e-12);
}

TEST_CASE("quadrature handles oscillation and reports its work") {
  const auto r = integrate_adaptive(
      [](double x) { return Complex{std::cos(50.0 * x), 0.0}; }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(r.value.real() - std::sin(50.0) / 50.0) < 1e-12);
  CHECK(r.evaluations > 21);
  CHECK(r.error_estimate <= 1e-12);
}

TEST_CASE("quadrature failure carries the best estimate") {
  QuadratureOptions o;
  o.max_subdivisions = 3;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-15;
  try {
    integrate_adaptive([](double x) { return Complex{1.0 / std::sqrt(x + 1e-12), 0.0}; }, 0.0, 1.0, o);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.code() == ErrorCode::kNoConvergence);
    CHECK(e.error_estimate() > 0.0);
    CHECK(std::isfinite(e.best_re()));
  }
}

TEST_CASE("quadrature rejects bad input") {
  auto f = [](double) { return Complex{1.0, 0.0}; };
  CHECK_THROWS_AS(integrate_adaptive(f, 0.0, 1.0, -1.0), Error);
  CHECK_THROWS_AS(integrate_adaptive(f, 0.0, INFINITY, 1e-8), Error);
}

TEST_CASE("compensated and pairwise sums") {
  CompensatedSum<double> s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
  std::vector<double> xs(1000, 0.1);
  CHECK(pairwise_sum(xs) == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  set_max_threads(4);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) {
    if (i == 3) throw std::runtime_error("boom");
  }));
  set_max_threads(0);
  CHECK(max_threads() >= 1);
}
