#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "brake/checks.hpp"
#include "brake/constraints.hpp"

using namespace brake;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("gap projection small cases") {
  CHECK(project_gaps(std::vector<double>{0.0, -1.0}, 0.0) == std::vector<double>{-0.5, -0.5});
  const auto p = project_gaps(std::vector<double>{0.0, 0.0}, 0.5);
  CHECK(p[0] == doctest::Approx(-0.25));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(project_gaps(std::vector<double>{0.0, 1.0, 2.0}, 0.5) == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(brute_force_projection(std::vector<double>{0.0, 0.0}, 0.5) == p);
}

TEST_CASE("gap projection matches the active-set oracle") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> nd(1, 5);
  std::normal_distribution<double> z(0.0, 0.6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = nd(rng);
    const double gap = 1.0 / n;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = z(rng);
      b[i] = z(rng);
    }
    const auto pa = project_gaps(a, gap);
    const auto pb = project_gaps(b, gap);
    CHECK(max_abs_diff(pa, brute_force_projection(a, gap)) <= 1e-9);
    CHECK(max_abs_diff(project_gaps(pa, gap), pa) <= 1e-14);
    CHECK(dist2(pa, pb) <= dist2(a, b) * (1 + 1e-12) + 1e-30);
    for (int i = 0; i + 1 < n; ++i) CHECK(pa[i + 1] - pa[i] >= gap - 1e-14);
  }
}

TEST_CASE("isotonic regression pools violators") {
  CHECK(isotonic_regression(std::vector<double>{1.0, 3.0, 2.0, 4.0}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(isotonic_regression(std::vector<double>{3.0, 2.0, 1.0}) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(isotonic_regression(std::vector<double>{}).empty());
}

TEST_CASE("symmetrize is an idempotent projection that keeps feasibility") {
  std::mt19937_64 rng(77);
  ProblemConfig cfg;
  cfg.n_agents = 6;
  cfg.grid = TimeGrid(12.0, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_feasible_grid(cfg.grid, 6, rng);
    const auto s = symmetrize(x);
    const auto s2 = symmetrize(s);
    CHECK(max_abs_diff(s.values(), s2.values()) <= 1e-15);
    const auto r = validate(s, cfg);
    CHECK(r.feasible);
    CHECK(r.symmetry_residual <= 1e-14);
  }
}

TEST_CASE("project_feasible") {
  std::mt19937_64 rng(8);
  ProblemConfig cfg;
  cfg.n_agents = 4;
  cfg.grid = TimeGrid(8.0, 16);
  std::normal_distribution<double> z(0.0, 0.5);

  SUBCASE("saturated symmetric block is a fixed point") {
    TrajectoryGrid x(cfg.grid, 4);
    for (int k = 0; k < 16; ++k)
      for (int i = 0; i < 4; ++i) x(k, i) = -0.375 + 0.25 * i;
    const auto p = project_feasible(x, cfg);
    CHECK(max_abs_diff(p.values(), x.values()) <= 1e-15);
  }
  SUBCASE("random input lands in the set and beats sampled competitors") {
    for (int trial = 0; trial < 20; ++trial) {
      TrajectoryGrid x(cfg.grid, 4);
      for (double& v : x.values()) v = z(rng);
      const auto p = project_feasible(x, cfg);
      const auto r = validate(p, cfg);
      CHECK(r.feasible);
      CHECK(r.symmetric);
      const double d = dist2(p.values(), x.values());
      for (int c = 0; c < 20; ++c) {
        auto comp = project_feasible(random_feasible_grid(cfg.grid, 4, rng), cfg);
        CHECK(d <= dist2(comp.values(), x.values()) + 1e-12);
      }
    }
  }
}

TEST_CASE("barycenter differences") {
  auto r = barycenter_report(std::vector<double>{0.0, 1.0, 3.0});
  CHECK(r.d == std::vector<double>{1.0, 2.0});
  CHECK(r.m[0] == doctest::Approx(2.0));
  CHECK(r.m[1] == doctest::Approx(2.5));
  CHECK(barycenter_expansion(r, 2) == doctest::Approx(2.5));

  r = barycenter_report(std::vector<double>{0.0, 0.25, 0.5, 0.75});
  for (double mj : r.m) CHECK(mj == doctest::Approx(0.5));

  std::vector<double> bumped{0.0, 0.25, 0.6, 0.85};
  r = barycenter_report(bumped);
  bool above = false;
  for (double mj : r.m) above = above || mj > 0.5 + 1e-3;
  CHECK(above);
  CHECK_THROWS_AS(barycenter_report(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("barycenter identity on random rows") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> row(2 + trial % 11);
    for (double& v : row) v = u(rng);
    std::sort(row.begin(), row.end());
    CHECK(barycenter_report(row).identity_residual <= 1e-10);
  }
}

TEST_CASE("expansion coefficients are positive") {
  // (N-j)/(N-J) - j/J > 0  <=>  J (N-j) - j (N-J) = N (J - j) > 0
  for (long n = 2; n <= 12; ++n)
    for (long big_j = 1; big_j < n; ++big_j)
      for (long j = 1; j < big_j; ++j) CHECK((n - j) * big_j - j * (n - big_j) > 0);
}

TEST_CASE("minimal barycenter bound") {
  const auto r = min_mj_bound_check(4, 0.25, 1000, 5);
  CHECK(r.passed);
  CHECK(r.near_equality > 0);
  CHECK(r.min_slack >= -1e-12);
  const auto r2 = min_mj_bound_check(2, 0.5, 200, 6);
  CHECK(r2.passed);
}
