#include "brake/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace brake {

TrajectoryGrid symmetrize(const TrajectoryGrid& traj) {
  const auto& grid = traj.grid();
  const int m = traj.steps();
  const int n = traj.n_agents();
  TrajectoryGrid half(grid, n);
  for (int k = 0; k < m; ++k) {
    const int kq = grid.reflect_quarter(k);
    for (int i = 0; i < n; ++i) half(k, i) = 0.5 * (traj(k, i) + traj(kq, i));
  }
  TrajectoryGrid out(grid, n);
  for (int k = 0; k < m; ++k) {
    const int kz = grid.reflect_zero(k);
    for (int i = 0; i < n; ++i) out(k, i) = 0.5 * (half(k, i) - half(kz, n - 1 - i));
  }
  return out;
}

std::vector<double> isotonic_regression(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<double> sum;
  std::vector<std::size_t> count;
  sum.reserve(n);
  count.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sum.push_back(y[i]);
    count.push_back(1);
    // merge while the last block mean is below its left neighbour's
    while (sum.size() > 1) {
      const std::size_t b = sum.size() - 1;
      if (sum[b - 1] * count[b] <= sum[b] * count[b - 1]) break;
      sum[b - 1] += sum[b];
      count[b - 1] += count[b];
      sum.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < sum.size(); ++b) {
    const double mean = sum[b] / count[b];
    out.insert(out.end(), count[b], mean);
  }
  return out;
}

std::vector<double> project_gaps(std::span<const double> row, double min_gap) {
  const std::size_t n = row.size();
  bool feasible = true;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(row[i + 1] - row[i] >= min_gap)) {
      feasible = false;
      break;
    }
  if (feasible) return {row.begin(), row.end()};

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = row[i] - i * min_gap;
  auto fit = isotonic_regression(y);
  for (std::size_t i = 0; i < n; ++i) fit[i] += i * min_gap;
  // Pooled blocks come back as exact arithmetic progressions only up to
  // rounding; push any gap that fell a few ulps short back onto the bound.
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (fit[i + 1] - fit[i] < min_gap) fit[i + 1] = fit[i] + min_gap;
  return fit;
}

TrajectoryGrid project_feasible(const TrajectoryGrid& traj, const ProblemConfig& cfg) {
  if (traj.n_agents() != cfg.n_agents || !(traj.grid() == cfg.grid))
    throw std::invalid_argument("trajectory shape does not match configuration");
  TrajectoryGrid cur = traj;
  for (int pass = 0; pass < 3; ++pass) {
    if (cfg.symmetric_class) cur = symmetrize(cur);
    for (int k = 0; k < cur.steps(); ++k) {
      auto fixed = project_gaps(cur.row(k), cfg.min_gap());
      std::copy(fixed.begin(), fixed.end(), cur.row(k).begin());
    }
    const auto rep = validate(cur, cfg, cfg.feas_tol);
    if (rep.feasible && (!cfg.symmetric_class || rep.symmetric)) return cur;
  }
  throw std::logic_error("feasibility projection failed to satisfy the constraints");
}

BarycenterReport barycenter_report(std::span<const double> row) {
  const int n = static_cast<int>(row.size());
  if (n < 2) throw std::invalid_argument("barycenter report needs at least two agents");
  BarycenterReport r;
  r.d.resize(n - 1);
  for (int i = 1; i < n; ++i) r.d[i - 1] = row[i] - row[i - 1];
  double total = 0.0;
  for (double x : row) total += x;
  r.m.resize(n - 1);
  double lower = 0.0;
  for (int j = 1; j < n; ++j) {
    lower += row[j - 1];
    const double upper = total - lower;
    r.m[j - 1] = upper / (n - j) - lower / j;
  }
  for (int j = 1; j < n; ++j)
    r.identity_residual = std::max(r.identity_residual, std::abs(r.m[j - 1] - barycenter_expansion(r, j)));
  return r;
}

double barycenter_expansion(const BarycenterReport& r, int big_j) {
  const int n = static_cast<int>(r.d.size()) + 1;
  double rhs = static_cast<double>(n - 1) / (n - big_j) * r.m[0];
  for (int j = 1; j < big_j; ++j) {
    const double coef = static_cast<double>(n - j) / (n - big_j) - static_cast<double>(j) / big_j;
    rhs -= coef * r.d[j - 1];
  }
  return rhs;
}

MinBarycenterCheck min_mj_bound_check(int n, double alpha, int trials, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> extra(0.0, 2.0 * alpha);
  std::uniform_real_distribution<double> offset(-5.0, 5.0);
  std::bernoulli_distribution tight(0.3);
  std::bernoulli_distribution saturated(0.05);

  MinBarycenterCheck out;
  out.passed = true;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.trials = trials;
  const double bound = alpha * n / 2.0;
  std::vector<double> row(n);
  for (int t = 0; t < trials; ++t) {
    const bool all_tight = saturated(rng);
    row[0] = offset(rng);
    bool all_equal = true;
    for (int i = 1; i < n; ++i) {
      const double g = (all_tight || tight(rng)) ? alpha : alpha + extra(rng);
      if (g != alpha) all_equal = false;
      row[i] = row[i - 1] + g;
    }
    const auto rep = barycenter_report(row);
    // gaps recomputed from positions carry rounding
    bool gaps_at_alpha = true;
    for (double d : rep.d)
      if (std::abs(d - alpha) > 1e-9) gaps_at_alpha = false;
    bool near = false;
    for (double mj : rep.m) {
      out.min_slack = std::min(out.min_slack, mj - bound);
      if (mj < bound - 1e-12) out.passed = false;
      if (mj <= bound + 1e-9) near = true;
    }
    if (near) {
      ++out.near_equality;
      if (!gaps_at_alpha) out.passed = false;
    }
    if (all_equal && !near) out.passed = false;
  }
  return out;
}

}  // namespace brake
