#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "brake/potentials.hpp"

using namespace brake;

TEST_CASE("smooth positive part closed form") {
  CHECK(smooth_positive_part(0.0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(smooth_positive_part(10.0) == doctest::Approx((0.1 * std::sqrt(10001.0) + 10.0) / 2).epsilon(1e-15));
  CHECK(std::abs(smooth_positive_part(10.0) - 10.0) < 1e-3);
  CHECK(std::abs(smooth_positive_part(-10.0)) < 1e-3);
  for (double x : {-3.0, -0.2, 0.0, 0.7, 4.0}) {
    CHECK(smooth_positive_part(x) > std::max(x, 0.0));
    const double h = 1e-6;
    const double fd = (smooth_positive_part(x + h) - smooth_positive_part(x - h)) / (2 * h);
    CHECK(smooth_positive_part_derivative(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("double well potential shape") {
  const auto w = PotentialSpec::smooth_double_well();
  CHECK(w.r0() == doctest::Approx(std::sqrt(3.0) + 0.1));
  CHECK(w.value(1.2) < 1.0);
  CHECK(w.value(0.0) > 4.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int j = 0; j < 100; ++j) {
    const double x = u(rng);
    CHECK(w.value(x) == w.value(-x));
    CHECK(w.value(x) >= 0.0);
  }
  for (double x = w.r0() + 0.01; x < w.r0() + 10.0; x += 0.37) {
    CHECK(x * w.derivative(x) > 0.0);
    CHECK(-x * w.derivative(-x) > 0.0);
  }
}

TEST_CASE("potential derivatives match finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& w : {PotentialSpec::smooth_double_well(), PotentialSpec::quadratic(2.5),
                        PotentialSpec::zero()}) {
    for (int j = 0; j < 1000; ++j) {
      const double x = u(rng);
      const double h = 1e-6;
      const double fd = (w.value(x + h) - w.value(x - h)) / (2 * h);
      CHECK(std::abs(w.derivative(x) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("potential families by name") {
  CHECK(PotentialSpec::from_name("quadratic", {3.0}).value(2.0) == 12.0);
  CHECK(PotentialSpec::from_name("paper_smooth_double_well", {2.0}).r0() == 2.0);
  CHECK(PotentialSpec::from_name("zero", {}).value(7.0) == 0.0);
  CHECK_THROWS_AS(PotentialSpec::from_name("quartic", {}), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::from_name("zero", {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::quadratic(-1.0), std::invalid_argument);
}

TEST_CASE("averaged potential over N points") {
  const auto w = PotentialSpec::smooth_double_well();
  for (double x : {-2.0, -0.3, 0.9}) CHECK(averaged_potential_n(w, 1, x).value == w.value(x));
  const auto q = PotentialSpec::quadratic();
  CHECK(averaged_potential_n(q, 2, 0.0).value == doctest::Approx(0.125));
  CHECK(averaged_potential_n(q, 2, 0.0).slope == doctest::Approx(0.5));
  // left Riemann sum: error is (W(x+1) - W(x)) / (2N) to leading order
  for (double x : {-1.5, -0.5, 0.0}) {
    const double err = averaged_potential_n(w, 256, x).value - averaged_potential_limit(w, x).value;
    CHECK(std::abs(err + (w.value(x + 1) - w.value(x)) / 512.0) <= 1e-4);
  }
  CHECK(std::abs(averaged_potential_n(w, 256, -0.5).value - averaged_potential_limit(w, -0.5).value) <= 1e-3);
}

TEST_CASE("window average potential") {
  const auto z = averaged_potential_limit(PotentialSpec::zero(), 0.4);
  CHECK(z.value == 0.0);
  CHECK(z.slope == 0.0);
  const auto q = averaged_potential_limit(PotentialSpec::quadratic(), 0.0);
  CHECK(q.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(q.slope == 1.0);
  const auto w = PotentialSpec::smooth_double_well();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int j = 0; j < 50; ++j) {
    const double x = u(rng);
    CHECK(averaged_potential_limit(w, -x - 1.0).value == doctest::Approx(averaged_potential_limit(w, x).value).epsilon(1e-10));
    const double h = 1e-4;
    const double fd = (averaged_potential_limit(w, x + h).value - averaged_potential_limit(w, x - h).value) / (2 * h);
    CHECK(std::abs(averaged_potential_limit(w, x).slope - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("inverse square root kernel") {
  auto kv = inverse_sqrt_kernel(1.0, 1.0);
  CHECK(kv.k == 1.0);
  CHECK(kv.dk == -0.5);
  CHECK(inverse_sqrt_kernel(1.0, 0.25).k == doctest::Approx(2.0));
  CHECK(inverse_sqrt_kernel(5.0, 0.5).k == doctest::Approx(5.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(inverse_sqrt_kernel(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(KernelSpec(1.0).value(-1.0), std::domain_error);
  const KernelSpec k(1.0);
  CHECK(k.value(1e6) < 1e-2 * k.value(1.0));
  double prev = k.value(1e-3);
  for (double r = 2e-3; r <= 10.0; r *= 1.1) {
    CHECK(k.derivative(r) <= 0.0);
    CHECK(k.value(r) <= prev);
    CHECK(k.value(r) >= 0.0);
    prev = k.value(r);
  }
}

TEST_CASE("adaptive quadrature") {
  double err = 0.0;
  CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12, &err) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(err <= 1e-12);
}
