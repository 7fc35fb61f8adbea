#include "brake/potentials.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace brake {

double smooth_positive_part(double x) {
  return (0.1 * std::sqrt(1.0 + 100.0 * x * x) + x) / 2.0;
}

double smooth_positive_part_derivative(double x) {
  return (10.0 * x / std::sqrt(1.0 + 100.0 * x * x) + 1.0) / 2.0;
}

PotentialSpec::PotentialSpec(PotentialFamily family, std::string name, std::vector<double> params,
                             double coef, double r0)
    : family_(family), name_(std::move(name)), params_(std::move(params)), coef_(coef), r0_(r0) {}

double PotentialSpec::default_well_r0() { return std::sqrt(3.0) + 0.1; }

PotentialSpec PotentialSpec::smooth_double_well(double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("R_0 must be positive");
  return PotentialSpec(PotentialFamily::smooth_double_well, "paper_smooth_double_well", {r0},
                       10.0, r0);
}

PotentialSpec PotentialSpec::quadratic(double coef, double r0) {
  if (!(coef > 0.0)) throw std::invalid_argument("quadratic coefficient must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("R_0 must be positive");
  return PotentialSpec(PotentialFamily::quadratic, "quadratic", {coef, r0}, coef, r0);
}

PotentialSpec PotentialSpec::zero() {
  return PotentialSpec(PotentialFamily::zero, "zero", {}, 0.0,
                       std::numeric_limits<double>::infinity());
}

PotentialSpec PotentialSpec::from_name(const std::string& name, const std::vector<double>& params) {
  if (name == "paper_smooth_double_well") {
    if (params.empty()) return smooth_double_well();
    if (params.size() == 1) return smooth_double_well(params[0]);
    throw std::invalid_argument("paper_smooth_double_well takes at most one parameter [R0]");
  }
  if (name == "quadratic") {
    if (params.empty()) return quadratic();
    if (params.size() == 1) return quadratic(params[0]);
    if (params.size() == 2) return quadratic(params[0], params[1]);
    throw std::invalid_argument("quadratic takes at most two parameters [coef, R0]");
  }
  if (name == "zero") {
    if (!params.empty()) throw std::invalid_argument("zero potential takes no parameters");
    return zero();
  }
  throw std::invalid_argument("unknown potential family '" + name + "'");
}

double PotentialSpec::value(double x) const {
  switch (family_) {
    case PotentialFamily::smooth_double_well: {
      const double x2 = x * x;
      return coef_ * (smooth_positive_part(0.5 - x2) + smooth_positive_part(x2 - 3.0));
    }
    case PotentialFamily::quadratic:
      return coef_ * x * x;
    case PotentialFamily::zero:
      return 0.0;
  }
  return 0.0;
}

double PotentialSpec::derivative(double x) const {
  switch (family_) {
    case PotentialFamily::smooth_double_well: {
      const double x2 = x * x;
      return coef_ * 2.0 * x *
             (smooth_positive_part_derivative(x2 - 3.0) - smooth_positive_part_derivative(0.5 - x2));
    }
    case PotentialFamily::quadratic:
      return 2.0 * coef_ * x;
    case PotentialFamily::zero:
      return 0.0;
  }
  return 0.0;
}

KernelSpec::KernelSpec(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("kernel strength must be positive");
}

double KernelSpec::value(double r) const { return inverse_sqrt_kernel(alpha_, r).k; }

double KernelSpec::derivative(double r) const { return inverse_sqrt_kernel(alpha_, r).dk; }

KernelValue inverse_sqrt_kernel(double alpha, double r) {
  if (!(r > 0.0)) throw std::domain_error("kernel evaluated at non-positive distance");
  const double k = alpha / std::sqrt(r);
  return {k, -0.5 * k / r};
}

ValueAndSlope averaged_potential_n(const PotentialSpec& pot, int n, double x) {
  if (n < 1) throw std::invalid_argument("averaged potential needs n >= 1");
  double v = 0.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = x + static_cast<double>(i) / n;
    v += pot.value(y);
    s += pot.derivative(y);
  }
  return {v / n, s / n};
}

double averaged_potential_n_slope(const PotentialSpec& pot, int n, double x) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += pot.derivative(x + static_cast<double>(i) / n);
  return s / n;
}

namespace {

double integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                    double& e) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  double l1 = 0.0;
  // one panel first to size the L1 norm (boost tolerances are relative to it);
  // asking for much less than 1e-12 relative only inflates the error estimate
  double v = gk::integrate(f, a, b, 0, 0.0, &e, &l1);
  if (!(e <= 0.1 * abs_tol)) {
    const double rel = std::max(0.1 * abs_tol / std::max(l1, 1e-300), 1e-12);
    v = gk::integrate(f, a, b, 20, rel, &e, &l1);
  }
  return v;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double* err) {
  double e = 0.0;
  const double v = integrate_gk(f, a, b, abs_tol, e);
  if (err != nullptr) *err = e;
  if (!(e <= abs_tol)) throw std::runtime_error("quadrature tolerance not reached");
  return v;
}

ValueAndSlope averaged_potential_limit(const PotentialSpec& pot, double x) {
  const double slope = pot.value(x + 1.0) - pot.value(x);
  if (pot.family() == PotentialFamily::zero) return {0.0, slope};
  // far out in the tails 1e-10 absolute is below rounding; the 1e-12
  // relative floor applies there instead of an error
  double e = 0.0;
  const double v = integrate_gk([&pot](double u) { return pot.value(u); }, x, x + 1.0, 1e-10, e);
  return {v, slope};
}

double averaged_potential_limit_slope(const PotentialSpec& pot, double x) {
  return pot.value(x + 1.0) - pot.value(x);
}

}  // namespace brake
