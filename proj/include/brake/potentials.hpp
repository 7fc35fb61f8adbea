#pragma once

#include <functional>
#include <string>
#include <vector>

namespace brake {

/// Smoothed positive part (0.1*sqrt(1 + (10x)^2) + x) / 2.
double smooth_positive_part(double x);
double smooth_positive_part_derivative(double x);

enum class PotentialFamily { smooth_double_well, quadratic, zero };

/// Confining potential W on the line together with the metadata the
/// diagnostics need. R_0 is user supplied: x * W'(x) > 0 is expected for
/// |x| > R_0 but is not computed.
class PotentialSpec {
 public:
  /// W(x) = 10 ((0.5 - x^2)^{a,+} + (x^2 - 3)^{a,+}), default R_0 = sqrt(3) + 0.1.
  static PotentialSpec smooth_double_well(double r0 = default_well_r0());
  /// W(x) = coef * x^2.
  static PotentialSpec quadratic(double coef = 1.0, double r0 = 0.1);
  /// W == 0. R_0 is infinite since x * W'(x) is never positive.
  static PotentialSpec zero();

  /// Builds from the config name and parameter list; throws std::invalid_argument.
  static PotentialSpec from_name(const std::string& name, const std::vector<double>& params);

  static double default_well_r0();

  PotentialFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  double r0() const { return r0_; }
  /// Overall scale: 10 for the double well, coef for the quadratic, 0 for zero.
  double coef() const { return coef_; }
  bool symmetric() const { return true; }

  double value(double x) const;
  double derivative(double x) const;

 private:
  PotentialSpec(PotentialFamily family, std::string name, std::vector<double> params, double coef,
                double r0);

  PotentialFamily family_;
  std::string name_;
  std::vector<double> params_;
  double coef_;
  double r0_;
};

/// Attractive kernel K(r) = alpha / sqrt(r) for r > 0.
class KernelSpec {
 public:
  explicit KernelSpec(double alpha = 1.0);

  double alpha() const { return alpha_; }
  /// Throws std::domain_error for r <= 0.
  double value(double r) const;
  double derivative(double r) const;

 private:
  double alpha_;
};

struct KernelValue {
  double k;
  double dk;
};

/// K = alpha r^{-1/2}, K' = -alpha r^{-3/2} / 2. Rejects r <= 0.
KernelValue inverse_sqrt_kernel(double alpha, double r);

struct ValueAndSlope {
  double value;
  double slope;
};

/// (1/n) sum_{i=0}^{n-1} W(x + i/n) and its derivative.
ValueAndSlope averaged_potential_n(const PotentialSpec& pot, int n, double x);
double averaged_potential_n_slope(const PotentialSpec& pot, int n, double x);

/// Window average int_x^{x+1} W by adaptive Gauss-Kronrod (abs tol 1e-10,
/// relaxed to 1e-12 relative where the window integral is large);
/// the slope is W(x+1) - W(x) exactly.
ValueAndSlope averaged_potential_limit(const PotentialSpec& pot, double x);
double averaged_potential_limit_slope(const PotentialSpec& pot, double x);

/// Adaptive Gauss-Kronrod on [a, b]. err receives the error estimate when
/// non-null; throws std::runtime_error if it exceeds abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double* err = nullptr);

}  // namespace brake
