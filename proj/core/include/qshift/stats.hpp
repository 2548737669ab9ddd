#pragma once

#include <cstddef>
#include <span>

namespace qshift {

/// Regularized incomplete beta I_x(a, b), evaluated with the Lentz continued
/// fraction (and the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) when x is past the
/// mean). Absolute error below 1e-10 for the Student-t use below.
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided p-value P(|T| >= |t|).
double student_t_two_sided_p(double t, double dof);

struct TTestResult {
  double t_statistic = 0.0;     // +-infinity when the differences have zero spread
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  double mean_difference = 0.0;
};

/// Paired two-sided t-test on d_i = a_i - b_i. Zero-variance differences
/// give t = 0, p = 1 when their mean is zero, else t = +-inf, p = 0.
/// Throws LengthMismatch, TooFewSamples.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Linear-interpolation quantile (R type 7) of sorted values, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace qshift
