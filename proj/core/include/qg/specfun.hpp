#pragma once

namespace qg {

//! Natural log of the Gamma function for x > 0.
//! Relative error below 1e-13 on [1e-3, 1e3].
double log_gamma(double x);

//! Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
//! Monotone nondecreasing in x; P(a, 0) = 0, P(a, inf) = 1.
//! Requires a > 0 and x >= 0.
double reg_lower_gamma(double a, double x);

//! Inverse of reg_lower_gamma in x: returns x with P(a, x) = p.
//! Requires a > 0 and 0 < p < 1.
double inv_reg_lower_gamma(double a, double p);

} // namespace qg
