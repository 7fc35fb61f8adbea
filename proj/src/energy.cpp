#include "brake/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace brake {
namespace {

void check_shape(const TrajectoryGrid& traj, const ProblemConfig& cfg) {
  if (traj.n_agents() != cfg.n_agents || !(traj.grid() == cfg.grid))
    throw std::invalid_argument("trajectory shape does not match configuration");
}

void check_gaps(std::span<const double> row) {
  for (std::size_t i = 0; i + 1 < row.size(); ++i)
    if (!(row[i + 1] - row[i] > 0.0))
      throw std::domain_error("trajectory has non-positive gap between consecutive agents");
}

}  // namespace

EnergyBreakdown energy(const TrajectoryGrid& traj, const ProblemConfig& cfg) {
  check_shape(traj, cfg);
  const int m = traj.steps();
  const int n = traj.n_agents();
  const double dt = cfg.grid.dt();
  const double alpha = cfg.kernel.alpha();

  double kin = 0.0;
  double pot = 0.0;
  double inter = 0.0;
  for (int k = 0; k < m; ++k) {
    auto row = traj.row(k);
    auto next = traj.row(cfg.grid.wrap(k + 1));
    check_gaps(row);
    for (int i = 0; i < n; ++i) {
      const double d = next[i] - row[i];
      kin += d * d;
      pot += cfg.potential.value(row[i]);
    }
    double pairs = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs += alpha / std::sqrt(row[j] - row[i]);
    inter += 2.0 * pairs;
  }
  EnergyBreakdown e;
  e.kinetic = kin / (2.0 * n * dt);
  e.potential = pot * dt / n;
  e.interaction = inter * dt / (static_cast<double>(n) * n);
  e.total = e.kinetic + e.potential - e.interaction;
  return e;
}

EnergyBreakdown energy_and_gradient(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                                    TrajectoryGrid& grad, GradientOptions options) {
  check_shape(traj, cfg);
  const int m = traj.steps();
  const int n = traj.n_agents();
  const double dt = cfg.grid.dt();
  const double alpha = cfg.kernel.alpha();
  if (grad.n_agents() != n || !(grad.grid() == cfg.grid)) grad = TrajectoryGrid(cfg.grid, n);

  const double kin_scale = 1.0 / (n * dt);
  const double pot_scale = dt / n;
  // d/dx^i of -(dt/N^2) sum_{i != j} K = -(2 dt/N^2) sum_j K'(|x^i - x^j|) sign(x^i - x^j)
  const double int_scale = (options.flip_interaction_sign ? 1.0 : -1.0) * 2.0 * dt /
                           (static_cast<double>(n) * n);

  double kin = 0.0;
  double pot = 0.0;
  double inter = 0.0;
  std::vector<double> force(n);
  for (int k = 0; k < m; ++k) {
    auto row = traj.row(k);
    auto prev = traj.row(cfg.grid.wrap(k - 1));
    auto next = traj.row(cfg.grid.wrap(k + 1));
    check_gaps(row);
    auto g = grad.row(k);
    std::fill(force.begin(), force.end(), 0.0);
    double pairs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double r = row[j] - row[i];
        const double kval = alpha / std::sqrt(r);
        const double dk = -0.5 * kval / r;
        pairs += kval;
        // sign(x^j - x^i) = +1 for j > i
        force[j] += dk;
        force[i] -= dk;
      }
    }
    inter += 2.0 * pairs;
    for (int i = 0; i < n; ++i) {
      const double d = next[i] - row[i];
      kin += d * d;
      pot += cfg.potential.value(row[i]);
      g[i] = (2.0 * row[i] - next[i] - prev[i]) * kin_scale +
             pot_scale * cfg.potential.derivative(row[i]) + int_scale * force[i];
    }
  }
  EnergyBreakdown e;
  e.kinetic = kin / (2.0 * n * dt);
  e.potential = pot * dt / n;
  e.interaction = inter * dt / (static_cast<double>(n) * n);
  e.total = e.kinetic + e.potential - e.interaction;
  return e;
}

TrajectoryGrid gradient(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                        GradientOptions options) {
  TrajectoryGrid g(cfg.grid, cfg.n_agents);
  energy_and_gradient(traj, cfg, g, options);
  return g;
}

double interaction_energy(const EmpiricalMeasure& mu, const KernelSpec& kernel) {
  const auto& p = mu.points();
  const int n = mu.size();
  double pairs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = p[j] - p[i];
      if (!(r > 0.0)) throw std::domain_error("coincident points in interaction energy");
      pairs += kernel.value(r);
    }
  return 2.0 * pairs / (static_cast<double>(n) * n);
}

double kn_constant(int n, const KernelSpec& kernel) {
  if (n < 1) throw std::invalid_argument("kn_constant needs n >= 1");
  // n - d ordered pairs at each separation d, counted in both orders
  double s = 0.0;
  for (int d = 1; d < n; ++d) s += static_cast<double>(n - d) * kernel.value(static_cast<double>(d) / n);
  return 2.0 * s / (static_cast<double>(n) * n);
}

}  // namespace brake
