#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "brake/checks.hpp"
#include "brake/constraints.hpp"
#include "brake/optimizer.hpp"

using namespace brake;

namespace {

ProblemConfig well_cfg(int n, double alpha, double period, int steps, bool symmetric = true) {
  ProblemConfig cfg;
  cfg.n_agents = n;
  cfg.grid = TimeGrid(period, steps);
  cfg.kernel = KernelSpec(alpha);
  cfg.potential = PotentialSpec::smooth_double_well();
  cfg.symmetric_class = symmetric;
  return cfg;
}

bool nonincreasing(const std::vector<HistoryRow>& h) {
  for (std::size_t j = 1; j < h.size(); ++j)
    if (h[j].energy > h[j - 1].energy + 1e-12) return false;
  return true;
}

}  // namespace

TEST_CASE("initial guesses") {
  auto cfg = well_cfg(2, 1.0, 8.0, 16);
  const auto s = initial_guess(cfg, InitMode::stationary_block, 0);
  for (int k = 0; k < 16; ++k) {
    CHECK(s(k, 0) == doctest::Approx(-0.25));
    CHECK(s(k, 1) == doctest::Approx(0.25));
  }
  cfg.n_agents = 7;
  for (auto mode : {InitMode::wells_oscillation, InitMode::stationary_block, InitMode::random}) {
    const auto r = validate(initial_guess(cfg, mode, 3), cfg);
    CHECK(r.feasible);
    CHECK(r.symmetric);
  }
  const auto a = initial_guess(cfg, InitMode::random, 42);
  const auto b = initial_guess(cfg, InitMode::random, 42);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK(init_mode_from_name("wells") == InitMode::wells_oscillation);
  CHECK(init_mode_from_name("stationary_block") == InitMode::stationary_block);
  CHECK(init_mode_name(InitMode::random) == "random");
  CHECK_THROWS_AS(init_mode_from_name("sideways"), std::invalid_argument);
}

TEST_CASE("single agent inside a well settles at the well bottom") {
  auto cfg = well_cfg(1, 1.0, 4.0, 16, false);
  TrajectoryGrid x(cfg.grid, 1);
  for (double& v : x.values()) v = -1.2;
  const auto r = minimize(cfg, x);
  CHECK(r.converged);
  CHECK(nonincreasing(r.history));
  // bottom of the left well sits near -1.3229
  for (double v : r.traj.values()) {
    CHECK(std::abs(v + 1.2) < 0.15);
    CHECK(std::abs(cfg.potential.derivative(v)) <= 1e-4);
  }
  TrajectoryGrid g(cfg.grid, 1);
  energy_and_gradient(r.traj, cfg, g);
  CHECK(projected_gradient_norm(r.traj, g, cfg) <= cfg.opt.grad_tol);
}

TEST_CASE("strong kernel pair saturates") {
  auto cfg = well_cfg(2, 5.0, 10.0, 64);
  const auto r = minimize(cfg, initial_guess(cfg, InitMode::wells_oscillation, 0));
  CHECK(r.converged);
  CHECK(r.status == "converged");
  CHECK(nonincreasing(r.history));
  CHECK(r.diagnostics.saturation_dev <= 1e-2);
  CHECK(verify_support(r, cfg.potential));
  CHECK(validate(r.traj, cfg).symmetric);

  SUBCASE("restarting at the minimizer is a fixed point") {
    const auto again = minimize(cfg, r.traj);
    CHECK(again.iterations <= 1);
    CHECK(std::abs(again.energy.total - r.energy.total) <= 1e-10);
  }
  SUBCASE("saturated optimality residuals") {
    const auto res = optimality_residuals(r, cfg);
    REQUIRE(res.size() == 1);
    CHECK(res[0].min_upper_slack >= -1e-2 * std::max(1.0, res[0].force_scale));
    CHECK(res[0].min_lower_slack >= -1e-2 * std::max(1.0, res[0].force_scale));
  }
}

TEST_CASE("minimize rejects bad starts") {
  auto cfg = well_cfg(3, 1.0, 4.0, 8);
  TrajectoryGrid x(cfg.grid, 3);
  CHECK_THROWS_AS(minimize(cfg, x), std::invalid_argument);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(minimize(cfg, random_feasible_grid(cfg.grid, 3, rng)), std::invalid_argument);
}

TEST_CASE("multistart keeps the lowest energy") {
  auto cfg = well_cfg(3, 1.0, 6.0, 16);
  const auto res = minimize_multistart(
      cfg, {InitMode::wells_oscillation, InitMode::stationary_block, InitMode::random}, 2);
  REQUIRE(res.runs.size() == 3);
  for (const auto& r : res.runs) CHECK(res.best.energy.total <= r.energy.total);
}

TEST_CASE("support and saturation checks") {
  auto cfg = well_cfg(3, 5.0, 4.0, 8);
  SolveResult far;
  far.traj = TrajectoryGrid(cfg.grid, 3);
  for (int k = 0; k < 8; ++k)
    for (int i = 0; i < 3; ++i) far.traj(k, i) = 10.0 + i;
  far.diagnostics = compute_diagnostics(far.traj, cfg);
  CHECK_FALSE(verify_support(far, cfg.potential));
  CHECK(far.diagnostics.saturation_dev == doctest::Approx(2.0 / 3.0));

  SolveResult block;
  block.traj = initial_guess(cfg, InitMode::stationary_block, 0);
  block.diagnostics = compute_diagnostics(block.traj, cfg);
  const auto sat = verify_saturation(block, cfg);
  CHECK(sat.saturation_dev <= 1e-15);
  const double r0 = cfg.potential.r0();
  CHECK(sat.min_abs_kernel_slope == doctest::Approx(2.5 * std::pow(2 * r0 + 2, -1.5)));
  CHECK(sat.max_abs_potential_slope > 0.0);
  CHECK(sat.sufficient_condition == (sat.min_abs_kernel_slope > sat.max_abs_potential_slope));
}

TEST_CASE("reduced ode residual of a resting block") {
  auto cfg = well_cfg(4, 5.0, 8.0, 32);
  const auto x = initial_guess(cfg, InitMode::stationary_block, 0);
  const auto rep = verify_reduced_ode(x, cfg);
  REQUIRE(rep.applicable);
  const double x1 = -3.0 / 8.0;
  CHECK(x(0, 0) == doctest::Approx(x1));
  CHECK(rep.interior == doctest::Approx(std::abs(averaged_potential_n_slope(cfg.potential, 4, x1))).epsilon(1e-12));
  CHECK(rep.boundary <= 1e-15);

  cfg.symmetric_class = false;
  CHECK_FALSE(verify_reduced_ode(x, cfg).applicable);
}

TEST_CASE("truncation never raises the energy") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> offset(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto cfg = well_cfg(2 + trial % 5, 1.0, 5.0, 16, false);
    auto x = random_feasible_grid(cfg.grid, cfg.n_agents, rng, 1.5);
    for (int k = 0; k < cfg.grid.steps(); ++k) {
      const double s = offset(rng);
      for (double& v : x.row(k)) v += s;
    }
    const auto t = truncate_to_support(x, cfg.potential.r0());
    CHECK(validate(t, cfg).feasible);
    CHECK(energy(t, cfg).total <= energy(x, cfg).total + 1e-12);
  }
}

TEST_CASE("agent upsampling keeps a saturated block saturated") {
  auto cfg = well_cfg(4, 5.0, 8.0, 16);
  const auto x = initial_guess(cfg, InitMode::wells_oscillation, 0);
  auto fine = cfg;
  fine.n_agents = 8;
  const auto y = upsample_agents(x, fine);
  const auto r = validate(y, fine);
  CHECK(r.feasible);
  CHECK(r.symmetric);
  CHECK(compute_diagnostics(y, fine).saturation_dev <= 1e-12);
}
