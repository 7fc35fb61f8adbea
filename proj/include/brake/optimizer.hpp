#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brake/energy.hpp"
#include "brake/model.hpp"

namespace brake {

enum class InitMode { wells_oscillation, stationary_block, random };

/// Accepts "wells_oscillation"/"wells", "stationary_block"/"stationary", "random".
InitMode init_mode_from_name(const std::string& name);
std::string init_mode_name(InitMode mode);

struct HistoryRow {
  long iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double saturation_dev = 0.0;
};

struct MinimizerDiagnostics {
  double support_radius = 0.0;
  double saturation_dev = 0.0;
  /// NaN when the reduced ODE check does not apply
  double ode_residual = 0.0;
  double stationarity_dev = 0.0;
};

struct SolveResult {
  TrajectoryGrid traj{TimeGrid{1.0, 4}, 1};
  std::vector<HistoryRow> history;
  bool converged = false;
  long iterations = 0;
  EnergyBreakdown energy;
  MinimizerDiagnostics diagnostics;
  /// "converged", "max_iters" or "line_search_failed"
  std::string status;
  std::string start;
};

/// Feasible (and symmetric when cfg.symmetric_class) starting grid.
/// seed only affects InitMode::random.
TrajectoryGrid initial_guess(const ProblemConfig& cfg, InitMode mode, std::uint64_t seed);

/// Saturated block whose lowest agent sits at a(t_k) + 1/(2N).
TrajectoryGrid block_from_orbit(const BrakeOrbit& orbit, int n_agents);

/// Warm start for a finer agent count: linear interpolation of the
/// quantile function u -> x^i at u = (i - 1/2)/N, evaluated at the new
/// agents' quantile levels, then projected.
TrajectoryGrid upsample_agents(const TrajectoryGrid& traj, const ProblemConfig& target);

/// Projected gradient descent with Armijo backtracking on the projected step.
/// Throws std::invalid_argument if start is infeasible or (symmetric class)
/// not symmetric.
SolveResult minimize(const ProblemConfig& cfg, const TrajectoryGrid& start,
                     GradientOptions options = {});

/// Norm of (x - P(x - s g)) / s with s = cfg.step0().
double projected_gradient_norm(const TrajectoryGrid& x, const TrajectoryGrid& g,
                               const ProblemConfig& cfg);

struct MultiStartResult {
  SolveResult best;
  std::vector<SolveResult> runs;
};

/// Runs every mode (in parallel up to threads workers) and keeps the lowest
/// energy; ties go to the lower saturation_dev.
MultiStartResult minimize_multistart(const ProblemConfig& cfg, const std::vector<InitMode>& modes,
                                     int threads = 1);

MinimizerDiagnostics compute_diagnostics(const TrajectoryGrid& traj, const ProblemConfig& cfg);

/// support_radius <= R_0 + 1 + 1e-6
bool verify_support(const SolveResult& result, const PotentialSpec& pot);

struct SaturationReport {
  double saturation_dev = 0.0;
  /// |K'(2 R_0 + 2)|
  double min_abs_kernel_slope = 0.0;
  /// max |W'| on 1e4 points of [-R_0 - 1, R_0 + 1]
  double max_abs_potential_slope = 0.0;
  bool sufficient_condition = false;
};

SaturationReport verify_saturation(const SolveResult& result, const ProblemConfig& cfg);

struct ReducedOdeReport {
  bool applicable = false;
  /// max of interior and boundary parts; NaN when not applicable
  double residual = 0.0;
  double interior = 0.0;
  double boundary = 0.0;
};

/// Compares the lowest agent with x'' = W_N'(x), x(0) = x(T/2) = -(N-1)/(2N).
/// Needs a symmetric-class result with saturation_dev <= 0.05.
ReducedOdeReport verify_reduced_ode(const TrajectoryGrid& traj, const ProblemConfig& cfg);
ReducedOdeReport verify_reduced_ode(const SolveResult& result, const ProblemConfig& cfg);

/// Group inequalities for the split after agent J (1-based):
///   A = -(upper mean)'' + mean_{upper} W' - 2/(N(N-J)) sum K'   >= 0
///   B =  (lower mean)'' - mean_{lower} W' - 2/(N J) sum K'      >= 0
/// with second differences on the grid. Both reduce to equalities where the
/// gap d^{J+1} exceeds 1/N + open_margin.
struct GroupResidual {
  int big_j = 0;
  double min_upper_slack = 0.0;
  double min_lower_slack = 0.0;
  /// max of |A|, |B| over nodes with an open gap; 0 when there are none
  double open_equality = 0.0;
  int open_nodes = 0;
  /// largest magnitude among the individual terms of A and B
  double force_scale = 0.0;
};

std::vector<GroupResidual> optimality_residuals(const TrajectoryGrid& traj,
                                                const ProblemConfig& cfg,
                                                double open_margin = 1e-3);
std::vector<GroupResidual> optimality_residuals(const SolveResult& result,
                                                const ProblemConfig& cfg);

/// Clamp x^i to [-R_0 - (N+1-i)/N, R_0 + i/N] (i 1-based). Keeps gaps >= 1/N.
TrajectoryGrid truncate_to_support(const TrajectoryGrid& traj, double r0);

}  // namespace brake
