#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

#include "brake/checks.hpp"
#include "brake/constraints.hpp"
#include "brake/model.hpp"

using namespace brake;

TEST_CASE("time grid nodes and reflections") {
  CHECK_THROWS_AS(TimeGrid(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(-1.0, 8), std::invalid_argument);
  const TimeGrid g(8.0, 8);
  CHECK(g.dt() == 1.0);
  CHECK(g.time(0) == -4.0);
  CHECK(g.time(g.index_of_zero()) == 0.0);
  CHECK(g.time(g.index_of_quarter()) == 2.0);
  CHECK(g.time(g.index_of_minus_quarter()) == -2.0);
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(9) == 1);
  // nodes equidistant from T/4 swap, T/4 itself is fixed
  CHECK(g.reflect_quarter(5) == 7);
  CHECK(g.reflect_quarter(7) == 5);
  CHECK(g.reflect_quarter(6) == 6);
  CHECK(g.reflect_zero(4) == 4);
  CHECK(g.reflect_zero(3) == 5);
  CHECK(g.reflect_zero(0) == 0);
}

TEST_CASE("symmetry maps are involutions") {
  std::mt19937_64 rng(5);
  for (int m = 4; m <= 64; m += 4) {
    for (int n : {1, 2, 5}) {
      const TimeGrid g(3.0, m);
      const auto maps = symmetry_index_maps(g, n);
      TrajectoryGrid x(g, n);
      std::normal_distribution<double> z;
      for (double& v : x.values()) v = z(rng);
      for (const auto* map : {&maps.quarter_reflection, &maps.space_time_reflection}) {
        const auto twice = apply_map(*map, apply_map(*map, x));
        CHECK(std::equal(twice.values().begin(), twice.values().end(), x.values().begin()));
      }
    }
  }
}

TEST_CASE("space-time reflection fixes the t = 0 row up to agent reversal and sign") {
  const TimeGrid g(4.0, 8);
  TrajectoryGrid x(g, 3);
  for (int k = 0; k < 8; ++k)
    for (int i = 0; i < 3; ++i) x(k, i) = 10 * k + i;
  const auto y = apply_map(symmetry_index_maps(g, 3).space_time_reflection, x);
  for (int i = 0; i < 3; ++i) CHECK(y(4, i) == -x(4, 2 - i));
  CHECK(y(3, 0) == -x(5, 2));
}

TEST_CASE("validate reports gap violations") {
  ProblemConfig cfg;
  cfg.n_agents = 4;
  cfg.grid = TimeGrid(2.0, 8);
  cfg.symmetric_class = false;
  TrajectoryGrid x(cfg.grid, 4);
  for (int k = 0; k < 8; ++k)
    for (int i = 0; i < 4; ++i) x(k, i) = -0.375 + 0.25 * i;
  auto r = validate(x, cfg);
  CHECK(r.feasible);
  CHECK(r.strictly_ordered);
  CHECK(r.max_violation == 0.0);

  x(3, 2) = x(3, 1) + 0.25 - 0.01;
  r = validate(x, cfg);
  CHECK_FALSE(r.feasible);
  CHECK(r.max_violation == doctest::Approx(0.01).epsilon(1e-9));

  TrajectoryGrid wrong(cfg.grid, 3);
  CHECK_THROWS_AS(validate(wrong, cfg), std::invalid_argument);
}

TEST_CASE("symmetrized grids validate as symmetric") {
  std::mt19937_64 rng(17);
  ProblemConfig cfg;
  cfg.n_agents = 5;
  cfg.grid = TimeGrid(7.0, 32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = symmetrize(random_feasible_grid(cfg.grid, 5, rng));
    const auto r = validate(x, cfg);
    CHECK(r.symmetric);
    CHECK(r.symmetry_residual <= 1e-12);
  }
}

TEST_CASE("empirical measure sorts and exposes quantiles") {
  EmpiricalMeasure mu({3.0, -1.0, 2.0, 0.5});
  CHECK(mu.points() == std::vector<double>{-1.0, 0.5, 2.0, 3.0});
  CHECK(mu.weight() == 0.25);
  CHECK(mu.quantile(0.25) == -1.0);
  CHECK(mu.quantile(0.26) == 0.5);
  CHECK(mu.quantile(1.0) == 3.0);
  CHECK_THROWS(EmpiricalMeasure(std::vector<double>{}));
}

TEST_CASE("check_config rejects bad values") {
  ProblemConfig cfg;
  CHECK_NOTHROW(check_config(cfg));
  cfg.n_agents = 0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.n_agents = 2;
  cfg.opt.grad_tol = 0.0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg.opt.grad_tol = 1e-6;
  cfg.opt.armijo_sigma = 1.0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
}

TEST_CASE("check_orbit on a hand-built symmetric orbit") {
  BrakeOrbit o;
  o.grid = TimeGrid(8.0, 16);
  for (int k = 0; k < 16; ++k) {
    const double t = o.grid.time(k);
    // sin(2 pi t / T) is even about T/4 and odd in t
    o.a.push_back(-0.5 + 0.3 * std::sin(2.0 * M_PI * t / 8.0));
    o.v.push_back(0.0);
  }
  const auto c = check_orbit(o);
  CHECK(c.boundary_residual <= 1e-14);
  CHECK(c.quarter_symmetry_residual <= 1e-14);
  CHECK(c.reflection_residual <= 1e-14);
}
