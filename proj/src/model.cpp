#include "brake/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brake {

TimeGrid::TimeGrid(double period, int steps) : period_(period), steps_(steps), dt_(0.0) {
  if (!(period > 0.0) || !std::isfinite(period)) throw std::invalid_argument("period must be positive");
  if (steps <= 0 || steps % 4 != 0)
    throw std::invalid_argument("time steps must be a positive multiple of 4");
  dt_ = period / steps;
}

TrajectoryGrid::TrajectoryGrid(TimeGrid grid, int n_agents)
    : grid_(grid), n_(n_agents), x_(static_cast<std::size_t>(grid.steps()) * n_agents, 0.0) {
  if (n_agents < 1) throw std::invalid_argument("need at least one agent");
}

TrajectoryGrid::TrajectoryGrid(TimeGrid grid, int n_agents, std::vector<double> values)
    : grid_(grid), n_(n_agents), x_(std::move(values)) {
  if (n_agents < 1) throw std::invalid_argument("need at least one agent");
  if (x_.size() != static_cast<std::size_t>(grid.steps()) * n_agents)
    throw std::invalid_argument("trajectory data does not match grid shape");
}

std::vector<double> TrajectoryGrid::agent(int i) const {
  std::vector<double> out(steps());
  for (int k = 0; k < steps(); ++k) out[k] = (*this)(k, i);
  return out;
}

void check_config(const ProblemConfig& cfg) {
  if (cfg.n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
  if (!(cfg.feas_tol > 0.0)) throw std::invalid_argument("feas_tol must be positive");
  if (!(cfg.opt.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (cfg.opt.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  if (!(cfg.opt.armijo_sigma > 0.0 && cfg.opt.armijo_sigma < 1.0))
    throw std::invalid_argument("armijo_sigma must lie in (0, 1)");
  if (cfg.opt.max_halvings < 1) throw std::invalid_argument("max_halvings must be >= 1");
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("empirical measure needs at least one point");
  for (double p : points_)
    if (!std::isfinite(p)) throw std::invalid_argument("empirical measure has non-finite point");
  std::sort(points_.begin(), points_.end());
}

double EmpiricalMeasure::quantile(double u) const {
  const int n = size();
  int i = static_cast<int>(std::ceil(u * n)) - 1;
  i = std::clamp(i, 0, n - 1);
  return points_[i];
}

SymmetryMaps symmetry_index_maps(const TimeGrid& grid, int n_agents) {
  if (grid.steps() % 4 != 0) throw std::invalid_argument("time steps must be divisible by 4");
  const int m = grid.steps();
  const auto n = static_cast<std::size_t>(n_agents);
  SymmetryMaps maps;
  maps.quarter_reflection.target.resize(m * n);
  maps.space_time_reflection.target.resize(m * n);
  maps.space_time_reflection.negate = true;
  for (int k = 0; k < m; ++k) {
    const auto kq = static_cast<std::size_t>(grid.reflect_quarter(k));
    const auto kz = static_cast<std::size_t>(grid.reflect_zero(k));
    for (std::size_t i = 0; i < n; ++i) {
      maps.quarter_reflection.target[k * n + i] = kq * n + i;
      maps.space_time_reflection.target[k * n + i] = kz * n + (n - 1 - i);
    }
  }
  return maps;
}

TrajectoryGrid apply_map(const IndexMap& map, const TrajectoryGrid& traj) {
  if (map.target.size() != traj.size()) throw std::invalid_argument("index map shape mismatch");
  TrajectoryGrid out(traj.grid(), traj.n_agents());
  auto src = traj.values();
  auto dst = out.values();
  const double s = map.negate ? -1.0 : 1.0;
  for (std::size_t f = 0; f < src.size(); ++f) dst[map.target[f]] = s * src[f];
  return out;
}

ValidationReport validate(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                          double symmetry_tol) {
  if (traj.n_agents() != cfg.n_agents || !(traj.grid() == cfg.grid))
    throw std::invalid_argument("trajectory shape does not match configuration");
  ValidationReport r;
  r.strictly_ordered = true;
  const int m = traj.steps();
  const int n = traj.n_agents();
  const double g = cfg.min_gap();
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i + 1 < n; ++i) {
      const double gap = traj(k, i + 1) - traj(k, i);
      if (!(gap > 0.0)) r.strictly_ordered = false;
      r.max_violation = std::max(r.max_violation, g - gap);
    }
  }
  r.feasible = r.strictly_ordered && r.max_violation <= cfg.feas_tol;

  const auto& grid = traj.grid();
  for (int k = 0; k < m; ++k) {
    const int kq = grid.reflect_quarter(k);
    const int kz = grid.reflect_zero(k);
    for (int i = 0; i < n; ++i) {
      r.symmetry_residual = std::max(r.symmetry_residual, std::abs(traj(k, i) - traj(kq, i)));
      r.symmetry_residual =
          std::max(r.symmetry_residual, std::abs(traj(k, i) + traj(kz, n - 1 - i)));
    }
  }
  r.symmetric = r.symmetry_residual <= symmetry_tol;
  return r;
}

OrbitCheck check_orbit(const BrakeOrbit& orbit) {
  const auto& g = orbit.grid;
  const int m = g.steps();
  if (static_cast<int>(orbit.a.size()) != m) throw std::invalid_argument("orbit shape mismatch");
  OrbitCheck c;
  c.boundary_residual = std::max(std::abs(orbit.a[g.index_of_zero()] + 0.5),
                                 std::abs(orbit.a[g.index_of_half()] + 0.5));
  for (int k = 0; k < m; ++k) {
    c.quarter_symmetry_residual =
        std::max(c.quarter_symmetry_residual, std::abs(orbit.a[k] - orbit.a[g.reflect_quarter(k)]));
    c.reflection_residual =
        std::max(c.reflection_residual, std::abs(orbit.a[k] + orbit.a[g.reflect_zero(k)] + 1.0));
  }
  return c;
}

}  // namespace brake
