#pragma once

#include <variant>
#include <vector>

#include "brake/model.hpp"
#include "brake/optimizer.hpp"

namespace brake {

/// Nonnegative density sampled at uniform nodes x_min + j dx, j = 0..size-1.
/// Mass is the trapezoid sum; the CDF is the piecewise-linear interpolation
/// of the cumulative trapezoid masses at the nodes.
class DensityGrid {
 public:
  /// Throws std::invalid_argument for fewer than 2 nodes, x_max <= x_min or
  /// negative/non-finite values.
  DensityGrid(double x_min, double x_max, std::vector<double> values);

  /// Samples f at n nodes of [x_min, x_max].
  template <class F>
  static DensityGrid sample(F f, double x_min, double x_max, int n) {
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = f(x_min + (x_max - x_min) * j / (n - 1));
    return DensityGrid(x_min, x_max, std::move(v));
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double dx() const { return (x_max_ - x_min_) / (values_.size() - 1); }
  int size() const { return static_cast<int>(values_.size()); }
  double x(int j) const { return x_min_ + (x_max_ - x_min_) * j / (values_.size() - 1); }
  const std::vector<double>& values() const { return values_; }
  double max_value() const;

  double mass() const { return cumulative_.back(); }
  /// Cumulative trapezoid mass up to node j.
  double cumulative(int j) const { return cumulative_[j]; }
  /// Piecewise-linear CDF, 0 left of the grid and mass() right of it.
  double cdf(double x) const;

 private:
  double x_min_;
  double x_max_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

/// Uniform probability on (lo, hi); the profile indicator is (a, a + 1).
struct IntervalIndicator {
  double lo = 0.0;
  double hi = 1.0;

  static IntervalIndicator unit_from(double a) { return {a, a + 1.0}; }
};

/// Linear piece of a quantile function: q goes from q0 at u0 to q1 at u1.
struct QuantilePiece {
  double u0;
  double u1;
  double q0;
  double q1;
};

/// Quantile function of a probability measure on (0, 1), stored as
/// consecutive linear pieces (constant pieces have q0 == q1).
using QuantileFunction = std::vector<QuantilePiece>;

QuantileFunction quantile_function(const EmpiricalMeasure& mu);
QuantileFunction quantile_function(const IntervalIndicator& mu);
/// Throws std::invalid_argument unless |mass - 1| <= 1e-6; the CDF is
/// rescaled to end at exactly 1.
QuantileFunction quantile_function(const DensityGrid& m);

/// Quantile function of m restricted to [-r, r] and normalized by M_R.
/// Throws std::invalid_argument when [-r, r] leaves the grid or carries no mass.
QuantileFunction restricted_quantile_function(const DensityGrid& m, double r);

double evaluate_quantile(const QuantileFunction& q, double u);

using Measure1D = std::variant<EmpiricalMeasure, IntervalIndicator, DensityGrid>;

/// L^2 and L^1 distances of quantile functions, integrated exactly on the
/// merged breakpoints (Simpson for squares of linear pieces, roots split
/// for absolute values).
double wasserstein2(const QuantileFunction& a, const QuantileFunction& b);
double wasserstein1(const QuantileFunction& a, const QuantileFunction& b);
double wasserstein2(const Measure1D& a, const Measure1D& b);
double wasserstein1(const Measure1D& a, const Measure1D& b);

struct QuantileParticles {
  EmpiricalMeasure particles;
  /// mass of m on [-R, R]
  double mass_r;
};

/// x^i with int_{-R}^{x^i} m = M_R/(2n) + (i-1) M_R/n, by inverting the
/// piecewise-linear CDF. Throws std::invalid_argument if a node in [-R, R]
/// has zero density or n < 1.
QuantileParticles quantile_particles(const DensityGrid& m, double r, int n);

/// Convolution with the Gaussian of variance eps truncated at 6 sqrt(eps).
/// The grid is extended by the truncation radius on both sides and the
/// result is rescaled to the input mass.
DensityGrid mollify(const DensityGrid& m, double eps);

/// Every consecutive gap >= c/N - 1e-12.
bool density_bound_check(const EmpiricalMeasure& mu, double c);

struct GammaEntry {
  int n_agents = 0;
  std::vector<double> probe_times;
  /// d2(empirical(t), indicator of (a(t), a(t)+1)) at each probe
  std::vector<double> d2;
  double max_d2 = 0.0;
  double energy = 0.0;
  double energy_gap = 0.0;
  /// max over probe pairs s < t of d2^2(mu_t, mu_s) / ((t-s) int_s^t mean |x'|^2)
  double equicontinuity_ratio = 0.0;
};

struct GammaReport {
  EnergyBreakdown meanfield;
  std::vector<GammaEntry> entries;
};

/// Probe times are the nodes k = j M/8, j = 0..7. Throws std::invalid_argument
/// when a solve's grid differs from the orbit's.
GammaReport gamma_convergence_report(const BrakeOrbit& orbit, const PotentialSpec& pot,
                                     const KernelSpec& kernel,
                                     const std::vector<SolveResult>& solves);

/// Equicontinuity ratio of a single trajectory over the 8 probe nodes.
double equicontinuity_ratio(const TrajectoryGrid& traj);

}  // namespace brake
