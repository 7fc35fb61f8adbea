#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "brake/model.hpp"

namespace brake {

/// Orthogonal projection onto grids with both reflection symmetries:
/// average under the T/4 reflection, then under the space-time reflection.
/// The two averaging maps commute, so the result is the projection onto the
/// intersection.
TrajectoryGrid symmetrize(const TrajectoryGrid& traj);

/// Euclidean projection of a row onto {x : x[i+1] - x[i] >= min_gap}.
/// Shifts y[i] = x[i] - i * min_gap, runs pool-adjacent-violators on y and
/// shifts back.
std::vector<double> project_gaps(std::span<const double> row, double min_gap);

/// Nondecreasing least-squares fit (equal weights), blocks merged left to right.
std::vector<double> isotonic_regression(std::span<const double> y);

/// Symmetrize (symmetric class only) and project every row onto the gap
/// constraint. Throws std::logic_error if three passes cannot satisfy both
/// constraint families within feas_tol.
TrajectoryGrid project_feasible(const TrajectoryGrid& traj, const ProblemConfig& cfg);

/// Gaps d^i = x^i - x^{i-1} (i = 2..N, stored from index 0) and barycenter
/// differences m^J = mean(x^{J+1..N}) - mean(x^{1..J}) (J = 1..N-1).
struct BarycenterReport {
  std::vector<double> d;
  std::vector<double> m;
  /// max_J |m^J - rhs_J| for the gap expansion
  ///   m^J = (N-1)/(N-J) m^1 - sum_{j<J} ((N-j)/(N-J) - j/J) d^{j+1}
  double identity_residual = 0.0;
};

/// Throws std::invalid_argument for rows shorter than 2.
BarycenterReport barycenter_report(std::span<const double> row);

/// Right-hand side of the gap expansion for a given J (1-based).
double barycenter_expansion(const BarycenterReport& r, int big_j);

struct MinBarycenterCheck {
  bool passed = false;
  /// min over trials and J of m^J - alpha N / 2
  double min_slack = 0.0;
  /// trials where some m^J came within 1e-9 of the bound
  int near_equality = 0;
  int trials = 0;
};

/// Samples rows with every gap >= alpha and checks m^J >= alpha N / 2 - 1e-12
/// with equality only for rows whose gaps all equal alpha.
MinBarycenterCheck min_mj_bound_check(int n, double alpha, int trials, std::uint64_t seed);

}  // namespace brake
