#pragma once

#include <functional>
#include <vector>

#include "brake/energy.hpp"
#include "brake/model.hpp"

namespace brake {

/// Force for a'' = F(a): the window average slope W(a+1) - W(a), or the
/// N-point average slope (1/N) sum W'(a + i/N).
struct OrbitForce {
  enum class Kind { limit, averaged_n };
  Kind kind = Kind::limit;
  int n = 1;

  static OrbitForce limit() { return {}; }
  static OrbitForce averaged(int n) { return {Kind::averaged_n, n}; }

  double operator()(const PotentialSpec& pot, double a) const;
  /// The potential whose slope is the force (W bar or W bar_N).
  double potential(const PotentialSpec& pot, double a) const;
};

struct OrbitSamples {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> v;
};

/// Velocity Verlet for a'' = F(a) from (a0, v0) over |t_span| with step dt;
/// a negative t_span runs backward in time. The last step is shortened to
/// land on t_span. Throws std::invalid_argument for dt <= 0.
OrbitSamples integrate_orbit(const PotentialSpec& pot, double a0, double v0, double t_span,
                             double dt, OrbitForce force = OrbitForce::limit());

/// v^2/2 - potential(a), conserved by the exact flow.
double orbit_energy(const PotentialSpec& pot, double a, double v,
                    OrbitForce force = OrbitForce::limit());

/// One root of the shooting map.
struct ShootingRoot {
  /// a(T/4)
  double turning_point = 0.0;
  /// a'(0)
  double v0 = 0.0;
  /// int over one period of a'^2/2 + W bar(a)
  double action = 0.0;
};

struct BrakeOrbitSolution {
  BrakeOrbit orbit;
  bool trivial = false;
  /// |a'(T/4)| of the forward run from (-1/2, v0) that produced the samples
  double shooting_residual = 0.0;
  /// |a(0) + 1/2| of the backward shot from the selected turning point
  double boundary_residual = 0.0;
  /// first zero of the force above -1/2 (NaN when trivial)
  double force_zero = 0.0;
  std::vector<ShootingRoot> roots;
  /// index into roots of the returned orbit
  int selected = -1;
  int substeps = 0;
};

/// Brake orbit of a'' = W(a+1) - W(a) with a(0) = -1/2 = a(T/2) and
/// a'(+-T/4) = 0. The quarter orbit is shot backward from the turning point
/// a(T/4) = c - delta, where c is the first force zero above -1/2; delta is
/// scanned log-spaced and refined by regula falsi in log delta. Integration runs in
/// __float128 with ceil(dt / 1e-3) substeps per grid step. The root with the
/// smallest action is kept, v0 is polished on the forward map a'(T/4), and
/// the forward samples on [0, T/4] are extended to the full grid by a(T/4 + s) = a(T/4 - s), a(-t) = -a(t) - 1.
/// When no nontrivial root exists, returns a == -1/2 flagged trivial.
BrakeOrbitSolution solve_brake_orbit(const PotentialSpec& pot, const TimeGrid& grid);

/// Max over grid nodes of |central second difference of a - F(a)|.
double orbit_ode_residual(const BrakeOrbit& orbit, const PotentialSpec& pot);

/// Interval profile m(t) = indicator of (a(t), a(t)+1).
struct IntervalProfile {
  TimeGrid grid{1.0, 4};
  std::vector<double> a;
};

IntervalProfile profile_from_orbit(const BrakeOrbit& orbit);

/// kinetic = sum (a_{k+1} - a_k)^2 / (2 dt), potential = dt sum W bar(a_k),
/// interaction = T * indicator_interaction(kernel).
EnergyBreakdown meanfield_energy(const IntervalProfile& profile, const PotentialSpec& pot,
                                 const KernelSpec& kernel);

/// I(indicator of (0,1)) = 2 int_0^1 (1-u) K(u) du, integrated in u = s^2 so
/// an r^{-1/2} singularity becomes smooth. Throws std::runtime_error if the
/// error estimate exceeds abs_tol.
double indicator_interaction(const KernelSpec& kernel, double abs_tol = 1e-10);
double indicator_interaction(const std::function<double(double)>& kernel, double abs_tol = 1e-10);

}  // namespace brake
