#include "brake/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "brake/meanfield.hpp"

namespace brake {
namespace {

double piece_value(const QuantilePiece& p, double u) {
  if (p.u1 == p.u0) return p.q0;
  return p.q0 + (p.q1 - p.q0) * (u - p.u0) / (p.u1 - p.u0);
}

// Walks both piece lists on the merged breakpoints and hands each common
// subinterval's width and endpoint differences to acc.
template <class Acc>
void merged_walk(const QuantileFunction& a, const QuantileFunction& b, Acc acc) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty quantile function");
  std::size_t i = 0;
  std::size_t j = 0;
  double u = 0.0;
  while (i < a.size() && j < b.size()) {
    const double end = std::min(a[i].u1, b[j].u1);
    if (end > u) {
      const double d0 = piece_value(a[i], u) - piece_value(b[j], u);
      const double d1 = piece_value(a[i], end) - piece_value(b[j], end);
      acc(end - u, d0, d1);
      u = end;
    }
    if (a[i].u1 <= u) ++i;
    if (j < b.size() && b[j].u1 <= u) ++j;
  }
}

QuantileFunction to_quantile(const Measure1D& m) {
  return std::visit([](const auto& x) { return quantile_function(x); }, m);
}

}  // namespace

DensityGrid::DensityGrid(double x_min, double x_max, std::vector<double> values)
    : x_min_(x_min), x_max_(x_max), values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("density grid needs at least 2 nodes");
  if (!(x_max > x_min)) throw std::invalid_argument("density grid needs x_max > x_min");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("density values must be finite and >= 0");
  cumulative_.resize(values_.size());
  cumulative_[0] = 0.0;
  const double h = dx();
  for (std::size_t j = 1; j < values_.size(); ++j)
    cumulative_[j] = cumulative_[j - 1] + 0.5 * h * (values_[j - 1] + values_[j]);
}

double DensityGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double DensityGrid::cdf(double xq) const {
  if (xq <= x_min_) return 0.0;
  if (xq >= x_max_) return mass();
  const double h = dx();
  int j = static_cast<int>(std::floor((xq - x_min_) / h));
  j = std::clamp(j, 0, size() - 2);
  const double frac = std::clamp((xq - x(j)) / h, 0.0, 1.0);
  return cumulative_[j] + frac * (cumulative_[j + 1] - cumulative_[j]);
}

QuantileFunction quantile_function(const EmpiricalMeasure& mu) {
  const int n = mu.size();
  QuantileFunction q;
  q.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = mu.points()[i];
    q.push_back({static_cast<double>(i) / n, static_cast<double>(i + 1) / n, x, x});
  }
  q.back().u1 = 1.0;
  return q;
}

QuantileFunction quantile_function(const IntervalIndicator& mu) {
  if (!(mu.hi > mu.lo)) throw std::invalid_argument("interval needs hi > lo");
  return {{0.0, 1.0, mu.lo, mu.hi}};
}

QuantileFunction quantile_function(const DensityGrid& m) {
  const double total = m.mass();
  if (!(std::abs(total - 1.0) <= 1e-6)) throw std::invalid_argument("density is not normalized");
  QuantileFunction q;
  for (int j = 0; j + 1 < m.size(); ++j) {
    if (!(m.cumulative(j + 1) > m.cumulative(j))) continue;
    q.push_back({m.cumulative(j) / total, m.cumulative(j + 1) / total, m.x(j), m.x(j + 1)});
  }
  q.back().u1 = 1.0;
  return q;
}

QuantileFunction restricted_quantile_function(const DensityGrid& m, double r) {
  if (!(r > 0.0) || -r < m.x_min() - 1e-12 || r > m.x_max() + 1e-12)
    throw std::invalid_argument("restriction window must lie inside the grid");
  std::vector<double> pts{-r};
  for (int j = 0; j < m.size(); ++j)
    if (m.x(j) > -r && m.x(j) < r) pts.push_back(m.x(j));
  pts.push_back(r);
  const double base = m.cdf(-r);
  const double mass_r = m.cdf(r) - base;
  if (!(mass_r > 0.0)) throw std::invalid_argument("no mass inside the restriction window");
  QuantileFunction q;
  double prev = 0.0;
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double next = m.cdf(pts[p + 1]) - base;
    if (next > prev) q.push_back({prev / mass_r, next / mass_r, pts[p], pts[p + 1]});
    prev = next;
  }
  q.back().u1 = 1.0;
  return q;
}

double evaluate_quantile(const QuantileFunction& q, double u) {
  if (q.empty()) throw std::invalid_argument("empty quantile function");
  auto it = std::lower_bound(q.begin(), q.end(), u,
                             [](const QuantilePiece& p, double v) { return p.u1 < v; });
  if (it == q.end()) it = std::prev(q.end());
  return piece_value(*it, std::clamp(u, it->u0, it->u1));
}

double wasserstein2(const QuantileFunction& a, const QuantileFunction& b) {
  double s = 0.0;
  merged_walk(a, b, [&s](double w, double d0, double d1) { s += w * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0; });
  return std::sqrt(std::max(s, 0.0));
}

double wasserstein1(const QuantileFunction& a, const QuantileFunction& b) {
  double s = 0.0;
  merged_walk(a, b, [&s](double w, double d0, double d1) {
    if ((d0 >= 0.0) == (d1 >= 0.0)) {
      s += 0.5 * w * (std::abs(d0) + std::abs(d1));
    } else {
      // linear difference crosses zero inside the piece
      s += 0.5 * w * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  });
  return s;
}

double wasserstein2(const Measure1D& a, const Measure1D& b) {
  return wasserstein2(to_quantile(a), to_quantile(b));
}

double wasserstein1(const Measure1D& a, const Measure1D& b) {
  return wasserstein1(to_quantile(a), to_quantile(b));
}

QuantileParticles quantile_particles(const DensityGrid& m, double r, int n) {
  if (n < 1) throw std::invalid_argument("need at least one particle");
  for (int j = 0; j < m.size(); ++j)
    if (m.x(j) >= -r - 1e-12 && m.x(j) <= r + 1e-12 && !(m.values()[j] > 0.0))
      throw std::invalid_argument("density vanishes inside the restriction window");
  const auto q = restricted_quantile_function(m, r);
  std::vector<double> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = evaluate_quantile(q, (i + 0.5) / n);
  return {EmpiricalMeasure(std::move(pts)), m.cdf(r) - m.cdf(-r)};
}

DensityGrid mollify(const DensityGrid& m, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollifier variance must be positive");
  const double h = m.dx();
  const double radius = 6.0 * std::sqrt(eps);
  const int half = static_cast<int>(std::floor(radius / h));
  std::vector<double> w(2 * half + 1);
  double wsum = 0.0;
  for (int l = -half; l <= half; ++l) {
    const double y = l * h;
    w[l + half] = std::exp(-y * y / (2.0 * eps));
    wsum += w[l + half];
  }
  for (double& x : w) x /= wsum;

  const int n = m.size();
  const int n_out = n + 2 * half;
  std::vector<double> out(n_out, 0.0);
  for (int j = 0; j < n_out; ++j) {
    double s = 0.0;
    for (int l = -half; l <= half; ++l) {
      const int src = j - half - l;
      if (src >= 0 && src < n) s += w[l + half] * m.values()[src];
    }
    out[j] = s;
  }
  DensityGrid raw(m.x_min() - half * h, m.x_max() + half * h, out);
  if (raw.mass() > 0.0) {
    const double scale = m.mass() / raw.mass();
    for (double& v : out) v *= scale;
  }
  return DensityGrid(raw.x_min(), raw.x_max(), std::move(out));
}

bool density_bound_check(const EmpiricalMeasure& mu, double c) {
  const auto& p = mu.points();
  const double need = c / mu.size() - 1e-12;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i + 1] - p[i] < need) return false;
  return true;
}

double equicontinuity_ratio(const TrajectoryGrid& traj) {
  const auto& g = traj.grid();
  const int m = g.steps();
  const int n = traj.n_agents();
  const double dt = g.dt();
  // per-step mean squared velocity times dt; windows are summed directly
  // since prefix differences lose the tiny increments of parked stretches
  std::vector<double> step(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = traj(g.wrap(k + 1), i) - traj(k, i);
      s += d * d;
    }
    step[k] = s / (n * dt);
  }
  double worst = 0.0;
  for (int p = 0; p < 8; ++p) {
    for (int q = p + 1; q < 8; ++q) {
      const int ks = p * m / 8;
      const int kt = q * m / 8;
      const auto mu_s = quantile_function(EmpiricalMeasure({traj.row(ks).begin(), traj.row(ks).end()}));
      const auto mu_t = quantile_function(EmpiricalMeasure({traj.row(kt).begin(), traj.row(kt).end()}));
      const double d2 = wasserstein2(mu_s, mu_t);
      double energy = 0.0;
      for (int k = ks; k < kt; ++k) energy += step[k];
      const double denom = (kt - ks) * dt * energy;
      double ratio = 0.0;
      if (denom > 0.0) ratio = d2 * d2 / denom;
      else if (d2 > 0.0) ratio = std::numeric_limits<double>::infinity();
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

GammaReport gamma_convergence_report(const BrakeOrbit& orbit, const PotentialSpec& pot,
                                     const KernelSpec& kernel,
                                     const std::vector<SolveResult>& solves) {
  GammaReport rep;
  rep.meanfield = meanfield_energy(profile_from_orbit(orbit), pot, kernel);
  const auto& g = orbit.grid;
  const int m = g.steps();
  for (const auto& s : solves) {
    if (!(s.traj.grid() == g)) throw std::invalid_argument("solve and orbit use different time grids");
    GammaEntry e;
    e.n_agents = s.traj.n_agents();
    for (int j = 0; j < 8; ++j) {
      const int k = j * m / 8;
      const auto row = s.traj.row(k);
      const double d2 = wasserstein2(quantile_function(EmpiricalMeasure({row.begin(), row.end()})),
                                     quantile_function(IntervalIndicator::unit_from(orbit.a[k])));
      e.probe_times.push_back(g.time(k));
      e.d2.push_back(d2);
      e.max_d2 = std::max(e.max_d2, d2);
    }
    e.energy = s.energy.total;
    e.energy_gap = std::abs(e.energy - rep.meanfield.total);
    e.equicontinuity_ratio = equicontinuity_ratio(s.traj);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace brake
