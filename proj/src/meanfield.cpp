#include "brake/meanfield.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace brake {
namespace {

using quad = __float128;

quad smooth_positive_part_q(quad x) { return (sqrtq(1 + 100 * x * x) / 10 + x) / 2; }

quad potential_q(const PotentialSpec& pot, quad x) {
  const quad c = pot.coef();
  switch (pot.family()) {
    case PotentialFamily::smooth_double_well: {
      const quad x2 = x * x;
      return c * (smooth_positive_part_q(quad(1) / 2 - x2) + smooth_positive_part_q(x2 - 3));
    }
    case PotentialFamily::quadratic:
      return c * x * x;
    case PotentialFamily::zero:
      return 0;
  }
  return 0;
}

quad force_q(const PotentialSpec& pot, quad a) { return potential_q(pot, a + 1) - potential_q(pot, a); }

struct QuarterRun {
  quad a_end = 0;
  quad v_end = 0;
  /// trapezoid integral of v^2 over the run
  quad v2_integral = 0;
};

// Verlet in quad precision from (a, v) for steps * h. When samples are
// requested, every n_sub-th state (including the first) is stored.
QuarterRun run_verlet_q(const PotentialSpec& pot, quad a, quad v, int steps, quad h, int n_sub,
                        std::vector<double>* sa = nullptr, std::vector<double>* sv = nullptr) {
  QuarterRun r;
  quad f = force_q(pot, a);
  if (sa != nullptr) {
    sa->push_back(static_cast<double>(a));
    sv->push_back(static_cast<double>(v));
  }
  for (int s = 1; s <= steps; ++s) {
    const quad v_old = v;
    const quad v_half = v + h / 2 * f;
    a += h * v_half;
    f = force_q(pot, a);
    v = v_half + h / 2 * f;
    r.v2_integral += h / 2 * (v_old * v_old + v * v);
    if (sa != nullptr && s % n_sub == 0) {
      sa->push_back(static_cast<double>(a));
      sv->push_back(static_cast<double>(v));
    }
  }
  r.a_end = a;
  r.v_end = v;
  return r;
}

// First zero of the force above -1/2 where it turns from negative to
// non-negative. Returns NaN when the force is not negative just above -1/2
// or never returns to zero.
quad first_force_zero(const PotentialSpec& pot) {
  const quad nan = std::numeric_limits<double>::quiet_NaN();
  const quad start = quad(-0.5) + quad(1e-6);
  if (!(force_q(pot, start) < 0)) return nan;
  const double reach = std::isfinite(pot.r0()) ? 2.0 * (pot.r0() + 1.0) : 10.0;
  const quad step = quad(1e-3);
  quad lo = start;
  quad hi = nan;
  for (quad a = start + step; a <= start + reach; a += step) {
    if (force_q(pot, a) >= 0) {
      hi = a;
      break;
    }
    lo = a;
  }
  if (isnanq(hi)) return nan;
  for (int it = 0; it < 300; ++it) {
    const quad mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    (force_q(pot, mid) < 0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double OrbitForce::operator()(const PotentialSpec& pot, double a) const {
  if (kind == Kind::limit) return averaged_potential_limit_slope(pot, a);
  return averaged_potential_n_slope(pot, n, a);
}

double OrbitForce::potential(const PotentialSpec& pot, double a) const {
  if (kind == Kind::limit) return averaged_potential_limit(pot, a).value;
  return averaged_potential_n(pot, n, a).value;
}

OrbitSamples integrate_orbit(const PotentialSpec& pot, double a0, double v0, double t_span,
                             double dt, OrbitForce force) {
  if (!(dt > 0.0)) throw std::invalid_argument("integration step must be positive");
  if (force.kind == OrbitForce::Kind::averaged_n && force.n < 1)
    throw std::invalid_argument("averaged force needs n >= 1");
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t_span) / dt - 1e-9)));
  const double h = t_span / steps;
  OrbitSamples out;
  out.t.reserve(steps + 1);
  out.a.reserve(steps + 1);
  out.v.reserve(steps + 1);
  double a = a0;
  double v = v0;
  double f = force(pot, a);
  out.t.push_back(0.0);
  out.a.push_back(a);
  out.v.push_back(v);
  for (long s = 1; s <= steps; ++s) {
    const double v_half = v + 0.5 * h * f;
    a += h * v_half;
    f = force(pot, a);
    v = v_half + 0.5 * h * f;
    out.t.push_back(s * h);
    out.a.push_back(a);
    out.v.push_back(v);
  }
  return out;
}

double orbit_energy(const PotentialSpec& pot, double a, double v, OrbitForce force) {
  return 0.5 * v * v - force.potential(pot, a);
}

BrakeOrbitSolution solve_brake_orbit(const PotentialSpec& pot, const TimeGrid& grid) {
  const int m = grid.steps();
  const int quarter_nodes = m / 4;
  BrakeOrbitSolution sol;
  sol.orbit.grid = grid;
  sol.substeps = std::max(1, static_cast<int>(std::ceil(grid.dt() / 1e-3 - 1e-12)));
  const int n_sub = sol.substeps;
  const int steps = quarter_nodes * n_sub;
  const quad h = quad(grid.period()) / m / n_sub;

  auto make_trivial = [&] {
    sol.trivial = true;
    sol.orbit.a.assign(m, -0.5);
    sol.orbit.v.assign(m, 0.0);
    sol.orbit.ode_residual = orbit_ode_residual(sol.orbit, pot);
    return sol;
  };

  const quad c = first_force_zero(pot);
  if (isnanq(c)) {
    sol.force_zero = std::numeric_limits<double>::quiet_NaN();
    return make_trivial();
  }
  sol.force_zero = static_cast<double>(c);

  auto residual = [&](quad delta) { return run_verlet_q(pot, c - delta, 0, steps, h, n_sub).a_end + quad(0.5); };

  // log-spaced scan of delta = c - a(T/4) over (1e-30, c + 1/2)
  const int scan = 64;
  const quad log_lo = logq(quad(1e-30));
  const quad log_hi = logq((c + quad(0.5)) * (1 - quad(1e-6)));
  std::vector<quad> deltas(scan), res(scan);
  for (int j = 0; j < scan; ++j) {
    deltas[j] = expq(log_lo + (log_hi - log_lo) * j / (scan - 1));
    res[j] = residual(deltas[j]);
  }

  std::vector<quad> root_deltas;
  for (int j = 0; j + 1 < scan; ++j) {
    if (res[j] == 0) {
      root_deltas.push_back(deltas[j]);
      continue;
    }
    if ((res[j] < 0) == (res[j + 1] < 0)) continue;
    // Illinois regula falsi in log delta; keeps the bracket
    quad lo = logq(deltas[j]), hi = logq(deltas[j + 1]);
    quad r_lo = res[j], r_hi = res[j + 1];
    int side = 0;
    for (int it = 0; it < 200; ++it) {
      quad mid = hi - r_hi * (hi - lo) / (r_hi - r_lo);
      if (!(mid > lo && mid < hi)) mid = (lo + hi) / 2;
      if (!(mid > lo && mid < hi)) break;
      const quad r_mid = residual(expq(mid));
      if (r_mid == 0) {
        lo = hi = mid;
        r_lo = r_hi = 0;
        break;
      }
      if ((r_mid < 0) == (r_lo < 0)) {
        lo = mid;
        r_lo = r_mid;
        if (side == -1) r_hi /= 2;
        side = -1;
      } else {
        hi = mid;
        r_hi = r_mid;
        if (side == 1) r_lo /= 2;
        side = 1;
      }
      if (hi - lo < quad(1e-32)) break;
    }
    root_deltas.push_back(expq(fabsq(r_lo) <= fabsq(r_hi) ? lo : hi));
  }
  if (root_deltas.empty()) return make_trivial();

  // rank the roots by action over one period
  double best_action = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < root_deltas.size(); ++r) {
    const quad turn = c - root_deltas[r];
    const auto run = run_verlet_q(pot, turn, 0, steps, h, n_sub);
    ShootingRoot root;
    root.turning_point = static_cast<double>(turn);
    root.v0 = static_cast<double>(-run.v_end);
    root.action = static_cast<double>(4 * run.v2_integral) +
                  grid.period() * averaged_potential_limit(pot, root.turning_point).value;
    sol.roots.push_back(root);
    if (root.action < best_action) {
      best_action = root.action;
      sol.selected = static_cast<int>(r);
    }
  }

  const quad turn = c - root_deltas[sol.selected];
  const auto back = run_verlet_q(pot, turn, 0, steps, h, n_sub);
  sol.boundary_residual = static_cast<double>(fabsq(back.a_end + quad(0.5)));

  // The backward shot leaves a(0) + 1/2 at the level of amplified rounding.
  // Polish v0 on the forward map v(T/4) from (-1/2, v0), which is what the
  // returned samples come from.
  auto forward_v = [&](quad v0) { return run_verlet_q(pot, quad(-0.5), v0, steps, h, n_sub).v_end; };
  quad v0 = -back.v_end;
  quad r0 = forward_v(v0);
  if (r0 != 0) {
    quad lo = v0, hi = v0, r_lo = r0, r_hi = r0;
    bool bracketed = false;
    for (quad w = quad(1e-20); w < quad(1e-4) && !bracketed; w *= 10) {
      for (const quad cand : {v0 * (1 - w), v0 * (1 + w)}) {
        const quad rc = forward_v(cand);
        if ((rc < 0) != (r0 < 0)) {
          lo = std::min(v0, cand);
          hi = std::max(v0, cand);
          r_lo = lo == v0 ? r0 : rc;
          r_hi = hi == v0 ? r0 : rc;
          bracketed = true;
          break;
        }
      }
    }
    if (bracketed) {
      int side = 0;
      for (int it = 0; it < 200; ++it) {
        quad mid = hi - r_hi * (hi - lo) / (r_hi - r_lo);
        if (!(mid > lo && mid < hi)) mid = (lo + hi) / 2;
        if (!(mid > lo && mid < hi)) break;
        const quad r_mid = forward_v(mid);
        if (r_mid == 0) {
          lo = hi = mid;
          r_lo = r_hi = 0;
          break;
        }
        if ((r_mid < 0) == (r_lo < 0)) {
          lo = mid;
          r_lo = r_mid;
          if (side == -1) r_hi /= 2;
          side = -1;
        } else {
          hi = mid;
          r_hi = r_mid;
          if (side == 1) r_lo /= 2;
          side = 1;
        }
      }
      v0 = fabsq(r_lo) <= fabsq(r_hi) ? lo : hi;
    }
  }
  std::vector<double> qa, qv;
  const auto fwd = run_verlet_q(pot, quad(-0.5), v0, steps, h, n_sub, &qa, &qv);
  sol.shooting_residual = static_cast<double>(fabsq(fwd.v_end));
  sol.roots[sol.selected].v0 = static_cast<double>(v0);

  auto& a = sol.orbit.a;
  auto& v = sol.orbit.v;
  a.assign(m, 0.0);
  v.assign(m, 0.0);
  // forward sample j sits at t = j dt, node M/2 + j
  const int kq = grid.index_of_quarter();
  for (int j = 0; j <= quarter_nodes; ++j) {
    a[grid.index_of_zero() + j] = qa[j];
    v[grid.index_of_zero() + j] = qv[j];
  }
  v[kq] = 0.0;
  for (int k = grid.index_of_zero(); k <= kq; ++k) {
    const int r = grid.reflect_quarter(k);
    a[r] = a[k];
    v[r] = -v[k];
  }
  for (int k = 1; k < grid.index_of_zero(); ++k) {
    const int r = grid.reflect_zero(k);
    a[k] = -a[r] - 1.0;
    v[k] = v[r];
  }
  sol.orbit.ode_residual = orbit_ode_residual(sol.orbit, pot);
  return sol;
}

double orbit_ode_residual(const BrakeOrbit& orbit, const PotentialSpec& pot) {
  const auto& g = orbit.grid;
  const int m = g.steps();
  if (static_cast<int>(orbit.a.size()) != m) throw std::invalid_argument("orbit shape mismatch");
  const double dt = g.dt();
  double r = 0.0;
  for (int k = 0; k < m; ++k) {
    const double acc = (orbit.a[g.wrap(k + 1)] - 2.0 * orbit.a[k] + orbit.a[g.wrap(k - 1)]) / (dt * dt);
    r = std::max(r, std::abs(acc - averaged_potential_limit_slope(pot, orbit.a[k])));
  }
  return r;
}

IntervalProfile profile_from_orbit(const BrakeOrbit& orbit) { return {orbit.grid, orbit.a}; }

EnergyBreakdown meanfield_energy(const IntervalProfile& profile, const PotentialSpec& pot,
                                 const KernelSpec& kernel) {
  const auto& g = profile.grid;
  const int m = g.steps();
  if (static_cast<int>(profile.a.size()) != m) throw std::invalid_argument("profile shape mismatch");
  const double dt = g.dt();
  EnergyBreakdown e;
  double kin = 0.0;
  double pot_sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double d = profile.a[g.wrap(k + 1)] - profile.a[k];
    kin += d * d;
    pot_sum += averaged_potential_limit(pot, profile.a[k]).value;
  }
  e.kinetic = kin / (2.0 * dt);
  e.potential = dt * pot_sum;
  e.interaction = g.period() * indicator_interaction(kernel);
  e.total = e.kinetic + e.potential - e.interaction;
  return e;
}

double indicator_interaction(const std::function<double(double)>& kernel, double abs_tol) {
  // u = s^2: 2 int_0^1 (1-u) K(u) du = 4 int_0^1 (1 - s^2) s K(s^2) ds
  return integrate_adaptive([&kernel](double s) { return 4.0 * (1.0 - s * s) * s * kernel(s * s); },
                            0.0, 1.0, abs_tol);
}

double indicator_interaction(const KernelSpec& kernel, double abs_tol) {
  return indicator_interaction([&kernel](double u) { return kernel.value(u); }, abs_tol);
}

}  // namespace brake
