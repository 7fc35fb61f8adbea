#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "brake/energy.hpp"
#include "brake/model.hpp"

namespace brake {

/// Rows with gaps 1/N + U(0, extra), centred near 0 with a random shift
/// per node. Not symmetric.
TrajectoryGrid random_feasible_grid(const TimeGrid& grid, int n_agents, std::mt19937_64& rng,
                                    double extra = 0.5);

struct GradientCheck {
  /// max_k,i |g - fd| / max(1, ||fd||_inf) over all entries
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

/// Central differences of energy() with step h at every entry.
GradientCheck gradient_check(const TrajectoryGrid& traj, const ProblemConfig& cfg, double h = 1e-5,
                             GradientOptions options = {});

/// Projection onto {x[i+1] - x[i] >= gap} by enumerating all 2^(n-1) active
/// sets, solving each equality-constrained least squares problem and keeping
/// the closest feasible candidate.
std::vector<double> brute_force_projection(std::span<const double> row, double gap);

struct DriftReport {
  /// max |E(t) - E(0)| over the run
  double max_drift = 0.0;
  /// true if |a| stayed within the potential's bounded region
  bool bounded = true;
};

/// Velocity Verlet in double for a'' = W(a+1) - W(a).
DriftReport verlet_energy_drift(const PotentialSpec& pot, double a0, double v0, double span, double dt);

}  // namespace brake
