#include "brake/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "brake/meanfield.hpp"

namespace brake {

TrajectoryGrid random_feasible_grid(const TimeGrid& grid, int n_agents, std::mt19937_64& rng, double extra) {
  std::uniform_real_distribution<double> gap(0.0, extra);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  TrajectoryGrid x(grid, n_agents);
  const double min_gap = 1.0 / n_agents;
  for (int k = 0; k < grid.steps(); ++k) {
    double pos = shift(rng);
    for (int i = 0; i < n_agents; ++i) {
      x(k, i) = pos;
      pos += min_gap + gap(rng);
    }
    const double centre = 0.5 * (x(k, 0) + x(k, n_agents - 1));
    for (int i = 0; i < n_agents; ++i) x(k, i) -= centre;
  }
  return x;
}

GradientCheck gradient_check(const TrajectoryGrid& traj, const ProblemConfig& cfg, double h,
                             GradientOptions options) {
  const auto g = gradient(traj, cfg, options);
  TrajectoryGrid fd(traj.grid(), traj.n_agents());
  TrajectoryGrid probe = traj;
  auto p = probe.values();
  auto f = fd.values();
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double x0 = p[j];
    p[j] = x0 + h;
    const double up = energy(probe, cfg).total;
    p[j] = x0 - h;
    const double down = energy(probe, cfg).total;
    p[j] = x0;
    f[j] = (up - down) / (2.0 * h);
  }
  double scale = 1.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  GradientCheck out;
  const auto gv = g.values();
  for (std::size_t j = 0; j < gv.size(); ++j) {
    const double e = std::abs(gv[j] - f[j]);
    out.max_abs_error = std::max(out.max_abs_error, e);
    out.max_rel_error = std::max(out.max_rel_error, e / scale);
  }
  return out;
}

std::vector<double> brute_force_projection(std::span<const double> row, double gap) {
  const int n = static_cast<int>(row.size());
  if (n == 0) return {};
  if (n > 20) throw std::invalid_argument("brute force projection is limited to 20 entries");
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<double> cand(n);
  // bit i set: constraint between i and i+1 is active
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    int start = 0;
    while (start < n) {
      int end = start;
      while (end < n - 1 && (mask >> end & 1u)) ++end;
      double c = 0.0;
      for (int j = start; j <= end; ++j) c += row[j] - (j - start) * gap;
      c /= (end - start + 1);
      for (int j = start; j <= end; ++j) cand[j] = c + (j - start) * gap;
      start = end + 1;
    }
    bool ok = true;
    for (int j = 0; j + 1 < n && ok; ++j) ok = cand[j + 1] - cand[j] >= gap - 1e-12;
    if (!ok) continue;
    double dist = 0.0;
    for (int j = 0; j < n; ++j) dist += (cand[j] - row[j]) * (cand[j] - row[j]);
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

DriftReport verlet_energy_drift(const PotentialSpec& pot, double a0, double v0, double span, double dt) {
  DriftReport out;
  const auto force = OrbitForce::limit();
  const int steps = static_cast<int>(std::ceil(span / dt - 1e-9));
  const double h = span / steps;
  double a = a0;
  double v = v0;
  double f = force(pot, a);
  const double e0 = orbit_energy(pot, a, v);
  const double limit = 4.0 * (pot.r0() + 1.0);
  for (int s = 0; s < steps; ++s) {
    v += 0.5 * h * f;
    a += h * v;
    f = force(pot, a);
    v += 0.5 * h * f;
    if (!(std::abs(a) <= limit)) {
      out.bounded = false;
      out.max_drift = std::numeric_limits<double>::infinity();
      return out;
    }
    out.max_drift = std::max(out.max_drift, std::abs(orbit_energy(pot, a, v) - e0));
  }
  return out;
}

}  // namespace brake
