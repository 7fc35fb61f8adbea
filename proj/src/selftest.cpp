#include "brake/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "brake/checks.hpp"
#include "brake/config.hpp"
#include "brake/constraints.hpp"
#include "brake/io.hpp"
#include "brake/measures.hpp"

namespace brake {
namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Outcome {
  bool passed;
  std::string detail;
};

Outcome barycenter_identity(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(2, 12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> row(n_dist(rng));
    for (double& x : row) x = u(rng);
    std::sort(row.begin(), row.end());
    worst = std::max(worst, barycenter_report(row).identity_residual);
  }
  return {worst <= 1e-10, fmt("max residual %.3e", worst)};
}

Outcome barycenter_bound(std::mt19937_64& rng) {
  double slack = INFINITY;
  bool ok = true;
  for (int n = 2; n <= 12; ++n) {
    const auto r = min_mj_bound_check(n, 1.0 / n, 100, rng());
    ok = ok && r.passed;
    slack = std::min(slack, r.min_slack);
  }
  return {ok, fmt("min slack %.3e", slack)};
}

Outcome gradient_suite(std::mt19937_64& rng, bool fault) {
  std::uniform_int_distribution<int> n_dist(2, 6);
  std::uniform_int_distribution<int> m_dist(2, 16);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ProblemConfig cfg;
    cfg.n_agents = n_dist(rng);
    cfg.grid = TimeGrid(5.0, 4 * m_dist(rng));
    cfg.kernel = KernelSpec(1.0);
    cfg.potential = PotentialSpec::smooth_double_well();
    cfg.symmetric_class = false;
    const auto x = random_feasible_grid(cfg.grid, cfg.n_agents, rng);
    GradientOptions opt;
    opt.flip_interaction_sign = fault;
    worst = std::max(worst, gradient_check(x, cfg, 1e-5, opt).max_rel_error);
  }
  return {worst <= 1e-6, fmt("max relative error %.3e", worst)};
}

Outcome projection_oracle(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 5);
  std::normal_distribution<double> z(0.0, 0.5);
  double worst = 0.0, idem = 0.0;
  bool expansive = false;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = n_dist(rng);
    const double gap = 1.0 / n;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = z(rng);
      b[i] = z(rng);
    }
    const auto pa = project_gaps(a, gap);
    const auto pb = project_gaps(b, gap);
    const auto oracle = brute_force_projection(a, gap);
    const auto again = project_gaps(pa, gap);
    double in = 0.0, out = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(pa[i] - oracle[i]));
      idem = std::max(idem, std::abs(again[i] - pa[i]));
      in += (a[i] - b[i]) * (a[i] - b[i]);
      out += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    }
    if (out > in * (1.0 + 1e-12) + 1e-24) expansive = true;
  }
  const bool ok = worst <= 1e-9 && idem <= 1e-12 && !expansive;
  return {ok, fmt("oracle gap %.3e, idempotence gap %.3e", worst, idem) + (expansive ? ", expansive" : "")};
}

Outcome wasserstein_forms() {
  double worst = 0.0;
  for (int n : {1, 2, 3, 8, 17, 64, 256}) {
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = 0.3 + (i + 0.5) / n;
    const double d2 = wasserstein2(Measure1D(EmpiricalMeasure(pts)), Measure1D(IntervalIndicator::unit_from(0.3)));
    worst = std::max(worst, std::abs(d2 - 1.0 / (n * std::sqrt(12.0))));
  }
  // translation: both distances equal the shift
  const Measure1D a = IntervalIndicator::unit_from(-0.5);
  const Measure1D b = IntervalIndicator::unit_from(0.75);
  worst = std::max(worst, std::abs(wasserstein2(a, b) - 1.25));
  worst = std::max(worst, std::abs(wasserstein1(a, b) - 1.25));
  return {worst <= 1e-10, fmt("max deviation %.3e", worst)};
}

Outcome drift_short_span() {
  const auto pot = PotentialSpec::smooth_double_well();
  const auto fine = verlet_energy_drift(pot, -0.5, 0.5, 5.0, 1e-3);
  const auto coarse = verlet_energy_drift(pot, -0.5, 0.5, 5.0, 2e-3);
  const double ratio = coarse.max_drift / fine.max_drift;
  const bool ok = fine.bounded && coarse.bounded && fine.max_drift <= 1e-5 && ratio > 3.0 && ratio < 5.0;
  return {ok, fmt("drift %.3e at dt=1e-3, halving ratio %.2f", fine.max_drift, ratio)};
}

Outcome csv_roundtrip(std::mt19937_64& rng) {
  const TimeGrid grid(50.0, 64);
  auto x = random_feasible_grid(grid, 7, rng);
  x(3, 2) = std::nextafter(x(3, 2), 1e9);
  std::stringstream s;
  write_trajectories_csv(s, x);
  const auto back = read_trajectories_csv(s);
  bool ok = back.grid() == grid && back.n_agents() == 7 &&
            std::equal(x.values().begin(), x.values().end(), back.values().begin());

  std::vector<HistoryRow> hist{{0, -1.0 / 3.0, 1e-300, 0.1}, {17, 2.5e10, 4.9e-324, 0.0}};
  std::stringstream hs;
  write_history_csv(hs, hist);
  const auto hb = read_history_csv(hs);
  ok = ok && hb.size() == hist.size();
  for (std::size_t j = 0; ok && j < hist.size(); ++j)
    ok = hb[j].iteration == hist[j].iteration && hb[j].energy == hist[j].energy &&
         hb[j].grad_norm == hist[j].grad_norm && hb[j].saturation_dev == hist[j].saturation_dev;

  BrakeOrbit orbit;
  orbit.grid = grid;
  std::normal_distribution<double> z;
  for (int k = 0; k < grid.steps(); ++k) {
    orbit.a.push_back(z(rng));
    orbit.v.push_back(z(rng));
  }
  std::stringstream os;
  write_orbit_csv(os, orbit);
  const auto ob = read_orbit_csv(os);
  ok = ok && ob.grid == grid && ob.a == orbit.a && ob.v == orbit.v;
  return {ok, ok ? "bit-exact" : "mismatch"};
}

Outcome svg_structure(std::mt19937_64& rng) {
  const TimeGrid grid(10.0, 32);
  const auto x = random_feasible_grid(grid, 5, rng);
  const auto c = check_svg(trajectories_svg(x));
  BrakeOrbit orbit;
  orbit.grid = grid;
  orbit.a.assign(grid.steps(), -0.5);
  orbit.v.assign(grid.steps(), 0.0);
  const auto o = check_svg(orbit_svg(orbit));
  const bool ok = c.well_formed && c.paths == 5 + 2 && o.well_formed;
  return {ok, fmt("%g paths for 5 agents", c.paths) + (c.error.empty() ? "" : ", " + c.error)};
}

Outcome digest_sensitivity() {
  const char* base =
      R"({"n_agents":18,"period":50,"time_steps":256,"kernel":{"alpha":5},)"
      R"("potential":{"name":"paper_smooth_double_well"},"symmetric_class":true,)"
      R"("opt":{"max_iters":1000,"grad_tol":1e-6,"seed":1}})";
  const auto cfg = parse_config(base);
  const auto d0 = config_digest(cfg);
  // canonical text parses back to the same digest
  bool ok = config_digest(parse_config(canonical_config(cfg))) == d0;
  std::vector<std::function<void(ProblemConfig&)>> edits = {
      [](ProblemConfig& c) { c.n_agents = 17; },
      [](ProblemConfig& c) { c.grid = TimeGrid(40.0, 256); },
      [](ProblemConfig& c) { c.grid = TimeGrid(50.0, 128); },
      [](ProblemConfig& c) { c.kernel = KernelSpec(1.0); },
      [](ProblemConfig& c) { c.potential = PotentialSpec::quadratic(); },
      [](ProblemConfig& c) { c.potential = PotentialSpec::smooth_double_well(2.0); },
      [](ProblemConfig& c) { c.symmetric_class = false; },
      [](ProblemConfig& c) { c.opt.max_iters = 999; },
      [](ProblemConfig& c) { c.opt.grad_tol = 1e-7; },
      [](ProblemConfig& c) { c.opt.seed = 2; },
      [](ProblemConfig& c) { c.opt.step0 = 1e-3; },
      [](ProblemConfig& c) { c.opt.armijo_sigma = 1e-3; },
      [](ProblemConfig& c) { c.opt.max_halvings = 30; },
      [](ProblemConfig& c) { c.feas_tol = 1e-8; },
  };
  int changed = 0;
  for (const auto& edit : edits) {
    auto c = cfg;
    edit(c);
    if (config_digest(c) != d0) ++changed;
  }
  ok = ok && changed == static_cast<int>(edits.size());
  return {ok, fmt("%g of %g edits change the digest", changed, static_cast<double>(edits.size()))};
}

}  // namespace

std::vector<SelftestCase> run_selftest(const SelftestOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<std::string, std::function<Outcome()>>> suites = {
      {"barycenter_identity", [&] { return barycenter_identity(rng); }},
      {"barycenter_bound", [&] { return barycenter_bound(rng); }},
      {"gradient_check", [&] { return gradient_suite(rng, options.inject_fault); }},
      {"projection_oracle", [&] { return projection_oracle(rng); }},
      {"wasserstein_closed_forms", [] { return wasserstein_forms(); }},
      {"verlet_drift_short_span", [] { return drift_short_span(); }},
      {"csv_roundtrip", [&] { return csv_roundtrip(rng); }},
      {"svg_structure", [&] { return svg_structure(rng); }},
      {"config_digest", [] { return digest_sensitivity(); }},
  };
  std::vector<SelftestCase> out;
  for (auto& [name, run] : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    SelftestCase c;
    c.name = name;
    try {
      const auto r = run();
      c.passed = r.passed;
      c.detail = r.detail;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("threw: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace brake
