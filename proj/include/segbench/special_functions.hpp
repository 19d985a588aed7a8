#pragma once

#include <functional>

namespace segbench {

// Standard normal density and distribution function.
double normal_pdf(double x);
double normal_cdf(double x);
// 1 - normal_cdf(x), accurate in the upper tail.
double normal_sf(double x);

// Regularized incomplete beta I_x(a, b) for x in [0, 1], a, b > 0.
double incomplete_beta(double x, double a, double b);

// F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
// Upper tail P(F > x), computed directly rather than as 1 - f_cdf.
double f_sf(double x, double d1, double d2);

// Student t, two-sided tail probability P(|T| > |t|).
double t_two_sided_p(double t, double df);

// P(Q <= q) for the studentized range of k normal means with nu degrees of
// freedom in the variance estimate; nu may be +infinity.
double studentized_range_cdf(double q, int k, double nu);
double studentized_range_sf(double q, int k, double nu);

// Adaptive quadrature on [a, b] with 20-point Gauss-Legendre panels. A panel
// is accepted when its two halves agree with it to `abs_tol`; otherwise the
// halves are refined with half the tolerance each, down to `max_depth`.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth = 30);

}  // namespace segbench
