#pragma once

#include "brake/model.hpp"

namespace brake {

/// total = kinetic + potential - interaction; interaction is the positive
/// pair sum and enters with a minus sign.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

/// Discretized N-agent energy with forward differences in time:
///   kinetic     = sum_k sum_i (x^i_{k+1} - x^i_k)^2 / (2 N dt)
///   potential   = (dt / N) sum_k sum_i W(x^i_k)
///   interaction = (dt / N^2) sum_k sum_{i != j} K(|x^i_k - x^j_k|)
/// Summation is time-major, agent-minor. Throws std::domain_error if any
/// consecutive gap is <= 0.
EnergyBreakdown energy(const TrajectoryGrid& traj, const ProblemConfig& cfg);

/// Test hook: flips the sign of the interaction contribution in gradient().
struct GradientOptions {
  bool flip_interaction_sign = false;
};

/// Exact gradient of energy() with respect to every grid value.
TrajectoryGrid gradient(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                        GradientOptions options = {});

/// Energy and gradient in one pass.
EnergyBreakdown energy_and_gradient(const TrajectoryGrid& traj, const ProblemConfig& cfg,
                                    TrajectoryGrid& grad, GradientOptions options = {});

/// (1/N^2) sum_{i != j} K(|x^i - x^j|). Throws std::domain_error on coincident points.
double interaction_energy(const EmpiricalMeasure& mu, const KernelSpec& kernel);

/// (1/n^2) sum_{i != j in 0..n-1} K(|i - j| / n), the interaction of a
/// saturated block.
double kn_constant(int n, const KernelSpec& kernel);

}  // namespace brake
