#pragma once

namespace seirdmon {

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

double chi_square_cdf(double x, double dof);

// Inverse CDF by bisection; |result - exact| < 1e-12 * max(1, result).
double chi_square_quantile(double p, double dof);

}  // namespace seirdmon
