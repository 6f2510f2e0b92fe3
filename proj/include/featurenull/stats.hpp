#pragma once

#include <span>

namespace featurenull::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  long n1 = 0;
  long n2 = 0;
};

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  long n = 0;
};

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
/// the modified Lentz method to 1e-15 relative.
double incomplete_beta(double a, double b, double x);

/// Student t cumulative distribution with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double dof);

/// Sample correlation with a two-sided p from t = r sqrt((n-2)/(1-r^2)).
/// Throws ArgumentError for mismatched lengths or n < 3,
/// DegenerateInputError when either input has zero variance.
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

/// Welch's unequal-variance t-test, two-sided, Welch-Satterthwaite dof.
/// Throws ArgumentError when a sample has fewer than 2 values or non-finite
/// entries, DegenerateInputError when both variances are zero.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);

/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

}  // namespace featurenull::stats
