#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brake/potentials.hpp"

namespace brake {

/// Uniform periodic grid on [-T/2, T/2): node k sits at t_k = -T/2 + k*dt.
/// The step count must be divisible by 4 so that t = -T/4, 0, T/4 are nodes
/// and both time reflections map nodes to nodes.
class TimeGrid {
 public:
  TimeGrid(double period, int steps);

  double period() const { return period_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double time(int k) const { return -0.5 * period_ + k * dt_; }

  int wrap(int k) const {
    const int r = k % steps_;
    return r < 0 ? r + steps_ : r;
  }

  int index_of_zero() const { return steps_ / 2; }
  int index_of_quarter() const { return 3 * steps_ / 4; }
  int index_of_minus_quarter() const { return steps_ / 4; }
  /// t = -T/2, which is t = T/2 by periodicity.
  int index_of_half() const { return 0; }

  /// k -> node reflected about t = T/4.
  int reflect_quarter(int k) const { return wrap(3 * steps_ / 2 - k); }
  /// k -> node reflected about t = 0.
  int reflect_zero(int k) const { return wrap(-k); }

  bool operator==(const TimeGrid& o) const { return period_ == o.period_ && steps_ == o.steps_; }

 private:
  double period_;
  int steps_;
  double dt_;
};

/// Positions of N ordered agents at every node, stored time-major
/// (row k holds x^1_{t_k} .. x^N_{t_k}).
class TrajectoryGrid {
 public:
  TrajectoryGrid(TimeGrid grid, int n_agents);
  TrajectoryGrid(TimeGrid grid, int n_agents, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  int n_agents() const { return n_; }
  int steps() const { return grid_.steps(); }
  std::size_t size() const { return x_.size(); }

  double operator()(int k, int i) const { return x_[static_cast<std::size_t>(k) * n_ + i]; }
  double& operator()(int k, int i) { return x_[static_cast<std::size_t>(k) * n_ + i]; }

  std::span<const double> row(int k) const {
    return {x_.data() + static_cast<std::size_t>(k) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<double> row(int k) {
    return {x_.data() + static_cast<std::size_t>(k) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const double> values() const { return x_; }
  std::span<double> values() { return x_; }

  /// Trajectory of a single agent over the grid.
  std::vector<double> agent(int i) const;

 private:
  TimeGrid grid_;
  int n_;
  std::vector<double> x_;
};

struct OptimizerSettings {
  long max_iters = 200000;
  double grad_tol = 1e-6;
  /// Reference step for the stationarity measure and the first trial step.
  /// Non-positive means 1e-2 * dt.
  double step0 = 0.0;
  double armijo_sigma = 1e-4;
  int max_halvings = 60;
  std::uint64_t seed = 0;
};

struct ProblemConfig {
  int n_agents = 1;
  TimeGrid grid{1.0, 4};
  KernelSpec kernel{1.0};
  PotentialSpec potential = PotentialSpec::zero();
  bool symmetric_class = true;
  OptimizerSettings opt{};
  double feas_tol = 1e-9;

  double min_gap() const { return 1.0 / n_agents; }
  double step0() const { return opt.step0 > 0.0 ? opt.step0 : 1e-2 * grid.dt(); }
};

/// Throws std::invalid_argument when an invariant fails.
void check_config(const ProblemConfig& cfg);

/// Equal-weight point cloud, kept sorted.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double weight() const { return 1.0 / points_.size(); }
  /// Quantile function F^{-1}(u) for u in (0, 1].
  double quantile(double u) const;

 private:
  std::vector<double> points_;
};

struct BrakeOrbit {
  TimeGrid grid{1.0, 4};
  std::vector<double> a;
  std::vector<double> v;
  double ode_residual = 0.0;
};

/// Flat-index involution on an M x N grid; sign flip applies when negate is set.
struct IndexMap {
  std::vector<std::size_t> target;
  bool negate = false;
};

struct SymmetryMaps {
  /// (k, i) -> (reflection of k about T/4, i)
  IndexMap quarter_reflection;
  /// (k, i) -> (reflection of k about 0, N+1-i), value negated
  IndexMap space_time_reflection;
};

SymmetryMaps symmetry_index_maps(const TimeGrid& grid, int n_agents);

TrajectoryGrid apply_map(const IndexMap& map, const TrajectoryGrid& traj);

struct ValidationReport {
  bool strictly_ordered = false;
  bool feasible = false;
  bool symmetric = false;
  /// max over k, i of (1/N - gap), clipped at 0
  double max_violation = 0.0;
  /// max residual under both reflections
  double symmetry_residual = 0.0;
};

/// Throws std::invalid_argument when shapes disagree with cfg.
ValidationReport validate(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                          double symmetry_tol = 1e-12);

/// Brake-orbit invariant residuals (boundary values and both symmetries).
struct OrbitCheck {
  double boundary_residual = 0.0;
  double quarter_symmetry_residual = 0.0;
  double reflection_residual = 0.0;
};

OrbitCheck check_orbit(const BrakeOrbit& orbit);

}  // namespace brake
