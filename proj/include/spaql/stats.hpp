#pragma once

#include <span>

namespace spaql {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased, n >= 2

// Continued-fraction regularized incomplete beta I_x(a, b); the backbone of
// the Student-t CDF and its inverse below.
double regularized_incomplete_beta(double a, double b, double x);

// P(T <= t) for Student-t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

// Two-sided critical value: P(|T| > result) = alpha.
double student_t_critical(double alpha, double dof);

struct ConfidenceInterval {
  double low = 0.0, high = 0.0;
};

// mean +/- t_{0.975, n-1} * s / sqrt(n). Requires n >= 2.
ConfidenceInterval ci95(std::span<const double> xs);

enum class Sided { kTwo, kOne };

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

// Welch's unequal-variance t-test. Sided::kOne tests "mean(a) > mean(b)".
// Degenerate inputs follow fixed conventions: n < 2 on either side, or both
// variances zero with equal means -> p = 1; zero variances with unequal
// means -> p = 0.
WelchResult welch_test(std::span<const double> a, std::span<const double> b, Sided sided);

// CartPole solved criterion: mean over exactly 100 evaluation returns >= 195.
bool solved_check(std::span<const double> returns);

}  // namespace spaql
