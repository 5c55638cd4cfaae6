#pragma once

namespace depsel {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of the standard normal CDF; p must lie in (0, 1).
double inverse_normal_cdf(double p);

// P(X <= a, Y <= b) for standard bivariate normal (X, Y) with correlation rho.
//
// Evaluated as the conditional integral
//   int_{-inf}^{a} phi(x) Phi((b - rho x) / sqrt(1 - rho^2)) dx
// by adaptive Gauss-Kronrod quadrature to an absolute error below 1e-7.
// rho = 0 and |rho| = 1 use closed forms.
double bivariate_normal_cdf(double a, double b, double rho);

} // namespace depsel
