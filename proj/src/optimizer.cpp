#include "brake/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "brake/constraints.hpp"

namespace brake {
namespace {

double saturation_dev(const TrajectoryGrid& x) {
  const int n = x.n_agents();
  const double gap = 1.0 / n;
  double dev = 0.0;
  for (int k = 0; k < x.steps(); ++k)
    for (int i = 0; i + 1 < n; ++i) dev = std::max(dev, std::abs(x(k, i + 1) - x(k, i) - gap));
  return dev;
}

// <g, x - y>
double linear_decrease(const TrajectoryGrid& g, const TrajectoryGrid& x, const TrajectoryGrid& y) {
  auto gv = g.values();
  auto xv = x.values();
  auto yv = y.values();
  double s = 0.0;
  for (std::size_t f = 0; f < gv.size(); ++f) s += gv[f] * (xv[f] - yv[f]);
  return s;
}

TrajectoryGrid step_and_project(const TrajectoryGrid& x, const TrajectoryGrid& g, double s,
                                const ProblemConfig& cfg) {
  TrajectoryGrid y = x;
  auto yv = y.values();
  auto gv = g.values();
  for (std::size_t f = 0; f < yv.size(); ++f) yv[f] -= s * gv[f];
  return project_feasible(y, cfg);
}

// potential slopes per group and the cross-group kernel slope sum, one row
struct GroupForces {
  double upper_w = 0.0;
  double lower_w = 0.0;
  double cross_k = 0.0;
};

}  // namespace

InitMode init_mode_from_name(const std::string& name) {
  if (name == "wells_oscillation" || name == "wells") return InitMode::wells_oscillation;
  if (name == "stationary_block" || name == "stationary") return InitMode::stationary_block;
  if (name == "random") return InitMode::random;
  throw std::invalid_argument("unknown initial guess mode: " + name);
}

std::string init_mode_name(InitMode mode) {
  switch (mode) {
    case InitMode::wells_oscillation: return "wells_oscillation";
    case InitMode::stationary_block: return "stationary_block";
    case InitMode::random: return "random";
  }
  return "unknown";
}

TrajectoryGrid initial_guess(const ProblemConfig& cfg, InitMode mode, std::uint64_t seed) {
  check_config(cfg);
  const int n = cfg.n_agents;
  const int m = cfg.grid.steps();
  const double t_period = cfg.grid.period();
  TrajectoryGrid x(cfg.grid, n);
  const double base = -(n - 1) / (2.0 * n);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) x(k, i) = base + static_cast<double>(i) / n;

  if (mode == InitMode::wells_oscillation) {
    const double amp = 0.5 * (std::sqrt(0.5) + std::sqrt(3.0));
    for (int k = 0; k < m; ++k) {
      const double t = cfg.grid.time(k);
      const double c = amp * std::cos(2.0 * M_PI * (t + 0.25 * t_period) / t_period);
      for (int i = 0; i < n; ++i) x(k, i) += c;
    }
  } else if (mode == InitMode::random) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (double& v : x.values()) v += jitter(rng);
  }
  return project_feasible(x, cfg);
}

TrajectoryGrid block_from_orbit(const BrakeOrbit& orbit, int n_agents) {
  if (static_cast<int>(orbit.a.size()) != orbit.grid.steps())
    throw std::invalid_argument("orbit shape mismatch");
  TrajectoryGrid x(orbit.grid, n_agents);
  for (int k = 0; k < orbit.grid.steps(); ++k)
    for (int i = 0; i < n_agents; ++i)
      x(k, i) = orbit.a[k] + (0.5 + i) / n_agents;
  return x;
}

TrajectoryGrid upsample_agents(const TrajectoryGrid& traj, const ProblemConfig& target) {
  if (!(traj.grid() == target.grid)) throw std::invalid_argument("time grid mismatch");
  const int n = traj.n_agents();
  const int n2 = target.n_agents;
  TrajectoryGrid out(target.grid, n2);
  for (int k = 0; k < traj.steps(); ++k) {
    auto row = traj.row(k);
    for (int j = 0; j < n2; ++j) {
      const double u = (j + 0.5) / n2;
      if (n == 1) {
        out(k, j) = row[0] + (u - 0.5);
        continue;
      }
      // segment between source levels (i + 1/2)/n and (i + 3/2)/n, extended at the ends
      int i = static_cast<int>(std::floor(u * n - 0.5));
      i = std::clamp(i, 0, n - 2);
      const double u0 = (i + 0.5) / n;
      const double slope = (row[i + 1] - row[i]) * n;
      out(k, j) = row[i] + slope * (u - u0);
    }
  }
  return project_feasible(out, target);
}

double projected_gradient_norm(const TrajectoryGrid& x, const TrajectoryGrid& g,
                               const ProblemConfig& cfg) {
  const double s0 = cfg.step0();
  const auto p = step_and_project(x, g, s0, cfg);
  auto xv = x.values();
  auto pv = p.values();
  double s = 0.0;
  for (std::size_t f = 0; f < xv.size(); ++f) s += (xv[f] - pv[f]) * (xv[f] - pv[f]);
  return std::sqrt(s) / s0;
}

SolveResult minimize(const ProblemConfig& cfg, const TrajectoryGrid& start,
                     GradientOptions options) {
  check_config(cfg);
  const auto rep = validate(start, cfg, cfg.feas_tol);
  if (!rep.feasible) throw std::invalid_argument("start trajectory is infeasible");
  if (cfg.symmetric_class && !rep.symmetric)
    throw std::invalid_argument("start trajectory is not in the symmetric class");

  const double s0 = cfg.step0();
  const double s_min = 1e-3 * s0;
  const double s_max = 1e6 * s0;
  const double sigma = cfg.opt.armijo_sigma;

  SolveResult res;
  TrajectoryGrid x = start;
  TrajectoryGrid g(cfg.grid, cfg.n_agents);
  TrajectoryGrid g_new(cfg.grid, cfg.n_agents);
  auto e = energy_and_gradient(x, cfg, g, options);
  double trial = s0;

  for (long it = 0;; ++it) {
    const double pg = projected_gradient_norm(x, g, cfg);
    res.history.push_back({it, e.total, pg, saturation_dev(x)});
    res.iterations = it;
    if (pg <= cfg.opt.grad_tol) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    if (it >= cfg.opt.max_iters) {
      res.status = "max_iters";
      break;
    }

    bool accepted = false;
    double s = trial;
    TrajectoryGrid y = x;
    EnergyBreakdown ey;
    for (int h = 0; h <= cfg.opt.max_halvings; ++h) {
      y = step_and_project(x, g, s, cfg);
      const double decrease = linear_decrease(g, x, y);
      ey = energy_and_gradient(y, cfg, g_new, options);
      if (decrease > 0.0 && ey.total <= e.total - sigma * decrease) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      res.status = "line_search_failed";
      break;
    }

    // Barzilai-Borwein guess for the next trial step
    double sy = 0.0;
    double ss = 0.0;
    {
      auto xv = x.values();
      auto yv = y.values();
      auto gv = g.values();
      auto gn = g_new.values();
      for (std::size_t f = 0; f < xv.size(); ++f) {
        const double dx = yv[f] - xv[f];
        ss += dx * dx;
        sy += dx * (gn[f] - gv[f]);
      }
    }
    trial = sy > 0.0 ? std::clamp(ss / sy, s_min, s_max) : std::min(2.0 * s, s_max);

    x = std::move(y);
    std::swap(g, g_new);
    e = ey;
  }

  res.traj = x;
  res.energy = e;
  res.diagnostics = compute_diagnostics(x, cfg);
  return res;
}

MultiStartResult minimize_multistart(const ProblemConfig& cfg, const std::vector<InitMode>& modes,
                                     int threads) {
  if (modes.empty()) throw std::invalid_argument("need at least one start mode");
  MultiStartResult out;
  out.runs.resize(modes.size());
  std::vector<std::exception_ptr> errors(modes.size());
  auto run = [&](std::size_t r) {
    try {
      auto start = initial_guess(cfg, modes[r], cfg.opt.seed);
      out.runs[r] = minimize(cfg, start);
      out.runs[r].start = init_mode_name(modes[r]);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(modes.size())));
  if (workers == 1) {
    for (std::size_t r = 0; r < modes.size(); ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < modes.size(); r += workers) run(r);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::size_t best = 0;
  for (std::size_t r = 1; r < out.runs.size(); ++r) {
    const auto& a = out.runs[r];
    const auto& b = out.runs[best];
    if (a.energy.total < b.energy.total ||
        (a.energy.total == b.energy.total &&
         a.diagnostics.saturation_dev < b.diagnostics.saturation_dev))
      best = r;
  }
  out.best = out.runs[best];
  return out;
}

MinimizerDiagnostics compute_diagnostics(const TrajectoryGrid& traj, const ProblemConfig& cfg) {
  MinimizerDiagnostics d;
  const int n = traj.n_agents();
  for (double v : traj.values()) d.support_radius = std::max(d.support_radius, std::abs(v));
  d.saturation_dev = saturation_dev(traj);
  for (int i = 0; i < n; ++i) {
    const auto path = traj.agent(i);
    const auto [lo, hi] = std::minmax_element(path.begin(), path.end());
    d.stationarity_dev = std::max(d.stationarity_dev, *hi - *lo);
  }
  d.ode_residual = verify_reduced_ode(traj, cfg).residual;
  return d;
}

bool verify_support(const SolveResult& result, const PotentialSpec& pot) {
  return result.diagnostics.support_radius <= pot.r0() + 1.0 + 1e-6;
}

SaturationReport verify_saturation(const SolveResult& result, const ProblemConfig& cfg) {
  SaturationReport r;
  r.saturation_dev = saturation_dev(result.traj);
  const double r0 = cfg.potential.r0();
  if (!std::isfinite(r0)) {
    r.min_abs_kernel_slope = 0.0;
    r.max_abs_potential_slope = 0.0;
    r.sufficient_condition = false;
    return r;
  }
  r.min_abs_kernel_slope = std::abs(cfg.kernel.derivative(2.0 * r0 + 2.0));
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    const double x = -(r0 + 1.0) + 2.0 * (r0 + 1.0) * s / (samples - 1);
    r.max_abs_potential_slope = std::max(r.max_abs_potential_slope, std::abs(cfg.potential.derivative(x)));
  }
  r.sufficient_condition = r.min_abs_kernel_slope > r.max_abs_potential_slope;
  return r;
}

ReducedOdeReport verify_reduced_ode(const TrajectoryGrid& traj, const ProblemConfig& cfg) {
  ReducedOdeReport r;
  const int n = traj.n_agents();
  const auto rep = validate(traj, cfg, 1e-9);
  if (!cfg.symmetric_class || !rep.symmetric || saturation_dev(traj) > 0.05) {
    r.residual = std::numeric_limits<double>::quiet_NaN();
    r.interior = r.residual;
    r.boundary = r.residual;
    return r;
  }
  r.applicable = true;
  const auto& grid = traj.grid();
  const double dt = grid.dt();
  const int m = grid.steps();
  const double anchor = -(n - 1) / (2.0 * n);
  for (int k = 0; k < m; ++k) {
    if (k == grid.index_of_zero() || k == grid.index_of_half()) continue;
    const double x = traj(k, 0);
    const double acc = (traj(grid.wrap(k + 1), 0) - 2.0 * x + traj(grid.wrap(k - 1), 0)) / (dt * dt);
    r.interior = std::max(r.interior, std::abs(acc - averaged_potential_n_slope(cfg.potential, n, x)));
  }
  r.boundary = std::max(std::abs(traj(grid.index_of_zero(), 0) - anchor),
                        std::abs(traj(grid.index_of_half(), 0) - anchor));
  r.residual = std::max(r.interior, r.boundary);
  return r;
}

ReducedOdeReport verify_reduced_ode(const SolveResult& result, const ProblemConfig& cfg) {
  return verify_reduced_ode(result.traj, cfg);
}

std::vector<GroupResidual> optimality_residuals(const TrajectoryGrid& traj,
                                                const ProblemConfig& cfg, double open_margin) {
  const int n = traj.n_agents();
  const auto& grid = traj.grid();
  const int m = grid.steps();
  const double dt = grid.dt();
  std::vector<GroupResidual> out;
  if (n < 2) return out;

  // group means per row, for every split
  std::vector<double> upper(static_cast<std::size_t>(m) * n), lower(static_cast<std::size_t>(m) * n);
  for (int k = 0; k < m; ++k) {
    auto row = traj.row(k);
    double total = 0.0;
    for (double v : row) total += v;
    double lo = 0.0;
    for (int j = 1; j < n; ++j) {
      lo += row[j - 1];
      lower[k * n + j] = lo / j;
      upper[k * n + j] = (total - lo) / (n - j);
    }
  }

  for (int j = 1; j < n; ++j) {
    GroupResidual gr;
    gr.big_j = j;
    gr.min_upper_slack = std::numeric_limits<double>::infinity();
    gr.min_lower_slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
      auto row = traj.row(k);
      const int kp = grid.wrap(k + 1);
      const int km = grid.wrap(k - 1);
      const double upper_acc = (upper[kp * n + j] - 2.0 * upper[k * n + j] + upper[km * n + j]) / (dt * dt);
      const double lower_acc = (lower[kp * n + j] - 2.0 * lower[k * n + j] + lower[km * n + j]) / (dt * dt);
      GroupForces f;
      for (int i = 0; i < n; ++i) {
        const double w = cfg.potential.derivative(row[i]);
        (i >= j ? f.upper_w : f.lower_w) += w;
      }
      for (int i = j; i < n; ++i)
        for (int l = 0; l < j; ++l) f.cross_k += cfg.kernel.derivative(row[i] - row[l]);
      const double up_w = f.upper_w / (n - j);
      const double lo_w = f.lower_w / j;
      const double up_k = 2.0 * f.cross_k / (static_cast<double>(n) * (n - j));
      const double lo_k = 2.0 * f.cross_k / (static_cast<double>(n) * j);
      const double a = -upper_acc + up_w - up_k;
      const double b = lower_acc - lo_w - lo_k;
      gr.min_upper_slack = std::min(gr.min_upper_slack, a);
      gr.min_lower_slack = std::min(gr.min_lower_slack, b);
      gr.force_scale = std::max({gr.force_scale, std::abs(upper_acc), std::abs(lower_acc),
                                 std::abs(up_w), std::abs(lo_w), std::abs(up_k), std::abs(lo_k)});
      if (row[j] - row[j - 1] > 1.0 / n + open_margin) {
        ++gr.open_nodes;
        gr.open_equality = std::max({gr.open_equality, std::abs(a), std::abs(b)});
      }
    }
    out.push_back(gr);
  }
  return out;
}

std::vector<GroupResidual> optimality_residuals(const SolveResult& result,
                                                const ProblemConfig& cfg) {
  return optimality_residuals(result.traj, cfg);
}

TrajectoryGrid truncate_to_support(const TrajectoryGrid& traj, double r0) {
  if (!std::isfinite(r0)) return traj;
  const int n = traj.n_agents();
  TrajectoryGrid out = traj;
  for (int k = 0; k < traj.steps(); ++k)
    for (int i = 0; i < n; ++i) {
      // 0-based i here is agent i+1
      const double lo = -r0 - static_cast<double>(n - i) / n;
      const double hi = r0 + static_cast<double>(i + 1) / n;
      out(k, i) = std::clamp(traj(k, i), lo, hi);
    }
  return out;
}

}  // namespace brake
