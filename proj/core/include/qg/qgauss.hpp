#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qg {

//! Parameters of the univariate quasi-Gaussian family
//!
//!   pdf(x) = omega(x - a) * exp(-(x - a)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))
//!   omega(d) = c_neg * |d|^alpha_neg  (d < 0)
//!            = c_pos *  d ^alpha_pos  (d > 0)
//!
//! subject to the normalization constraint
//!
//!   c_neg * I(alpha_neg, sigma) + c_pos * I(alpha_pos, sigma) = sigma sqrt(2 pi)
//!
//! with I(alpha, sigma) as in i_alpha(). alpha_neg = alpha_pos = 0 with
//! c_neg = c_pos = 1 recovers the normal distribution N(a, sigma^2).
struct QuasiGaussianParams {
    double a = 0.0;         //!< quasi-center
    double alpha_neg = 0.0; //!< left-side exponent, > -1
    double alpha_pos = 0.0; //!< right-side exponent, > -1
    double sigma = 1.0;     //!< quasi-standard, > 0
    double c_neg = 1.0;     //!< left-side constant, >= 0
    double c_pos = 1.0;     //!< right-side constant, >= 0
};

//! I(alpha, sigma) = integral_0^inf x^alpha exp(-x^2/(2 sigma^2)) dx
//!                 = 2^((alpha-1)/2) sigma^(alpha+1) Gamma((alpha+1)/2).
//! Requires alpha > -1 and sigma > 0.
double i_alpha(double alpha, double sigma);

//! log of i_alpha; overflow-safe for large exponents.
double log_i_alpha(double alpha, double sigma);

//! Builds normalized parameters from the single free degree of freedom
//! right_mass = P(X > a) in [0, 1]. The returned constants satisfy the
//! normalization constraint exactly (up to rounding).
QuasiGaussianParams make_params(double a, double alpha_neg, double alpha_pos,
                                double sigma, double right_mass);

//! Throws std::domain_error unless the parameter invariants hold and the
//! normalization constraint is met within `tol` relative.
void validate(const QuasiGaussianParams& p, double tol = 1e-12);

double right_mass(const QuasiGaussianParams& p); //!< P(X > a)
double left_mass(const QuasiGaussianParams& p);  //!< P(X < a)

//! Density. At x == a the symmetric (Lebesgue) value is returned: the mean
//! of the one-sided limits, which is +inf when a side has negative exponent
//! and positive constant. The +inf return marks the singular point; it is
//! never produced by rounding.
double pdf(const QuasiGaussianParams& p, double x);

//! log of pdf(); -inf where the density vanishes. Underflow-safe in the
//! far tails, which matters for likelihood sums.
double log_pdf(const QuasiGaussianParams& p, double x);

//! Distribution function; cdf(a) equals left_mass(p).
double cdf(const QuasiGaussianParams& p, double x);

//! Inverse cdf by bracketed bisection (no derivatives, robust across the
//! possible density singularity at the quasi-center). 0 < u < 1.
double quantile(const QuasiGaussianParams& p, double u);

//! n i.i.d. draws, deterministic per seed. Exact sampling: a side is chosen
//! with its mass, then a + sigma*sqrt(2 G) with G ~ Gamma((alpha+1)/2, 1)
//! has precisely the one-sided density.
std::vector<double> sample(const QuasiGaussianParams& p, std::uint64_t seed, std::size_t n);

enum class MomentSide {
    Positive, //!< E (X-a)^p restricted to X > a
    Negative, //!< E |X-a|^p restricted to X < a
    Absolute, //!< E |X-a|^p
    Signed,   //!< positive part minus negative part
};

struct SideMoment {
    double p = 1.0;
    MomentSide side = MomentSide::Absolute;
};

//! Moments about the quasi-center:
//!   E (X-a)^p_+ = c_pos * I(alpha_pos + p, sigma) / (sigma sqrt(2 pi))
//! and mirrored on the left. Requires alpha + p > -1 on every side with a
//! nonzero constant, otherwise the moment diverges (std::domain_error).
double moment(const QuasiGaussianParams& p, SideMoment m);

enum class TailSide { Upper, Lower };

//! Leading-order tail approximation at displacement y > 0 from the
//! quasi-center:
//!   P(X - a > y)  ~  (c_pos sigma / sqrt(2 pi)) y^(alpha_pos - 1) e^(-y^2/(2 sigma^2))
//! (mirrored for the lower tail). The exact tail is 1 - cdf(a + y).
double tail_asymptote(const QuasiGaussianParams& p, double y, TailSide side);

} // namespace qg
