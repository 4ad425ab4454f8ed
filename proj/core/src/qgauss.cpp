#include "qg/qgauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qg/rng.hpp"
#include "qg/specfun.hpp"

namespace qg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sqrt_two_pi()
{
    return std::sqrt(2.0 * std::numbers::pi);
}

// Gaussian kernel with the (2 pi)^{-1/2} sigma^{-1} factor included.
double gauss_kernel(double d, double sigma)
{
    return std::exp(-d * d / (2.0 * sigma * sigma)) / (sigma * sqrt_two_pi());
}

// One-sided limit of the density at the quasi-center.
double center_limit(double alpha, double c, double sigma)
{
    if (c == 0.0)
        return 0.0;
    if (alpha > 0.0)
        return 0.0;
    if (alpha == 0.0)
        return c * gauss_kernel(0.0, sigma);
    return kInf;
}

} // namespace

double i_alpha(double alpha, double sigma)
{
    if (!(alpha > -1.0))
        throw std::domain_error("i_alpha: requires alpha > -1");
    if (!(sigma > 0.0))
        throw std::domain_error("i_alpha: requires sigma > 0");
    return std::exp2(0.5 * (alpha - 1.0)) * std::pow(sigma, alpha + 1.0)
        * std::exp(log_gamma(0.5 * (alpha + 1.0)));
}

double log_i_alpha(double alpha, double sigma)
{
    if (!(alpha > -1.0))
        throw std::domain_error("log_i_alpha: requires alpha > -1");
    if (!(sigma > 0.0))
        throw std::domain_error("log_i_alpha: requires sigma > 0");
    return 0.5 * (alpha - 1.0) * std::numbers::ln2 + (alpha + 1.0) * std::log(sigma)
        + log_gamma(0.5 * (alpha + 1.0));
}

QuasiGaussianParams make_params(double a, double alpha_neg, double alpha_pos,
                                double sigma, double right_mass)
{
    if (!(alpha_neg > -1.0) || !(alpha_pos > -1.0))
        throw std::domain_error("make_params: requires alpha > -1 on both sides");
    if (!(sigma > 0.0))
        throw std::domain_error("make_params: requires sigma > 0");
    if (!(right_mass >= 0.0 && right_mass <= 1.0))
        throw std::domain_error("make_params: requires right_mass in [0, 1]");

    QuasiGaussianParams p;
    p.a = a;
    p.alpha_neg = alpha_neg;
    p.alpha_pos = alpha_pos;
    p.sigma = sigma;
    const double total = sigma * sqrt_two_pi();
    p.c_pos = right_mass * total / i_alpha(alpha_pos, sigma);
    p.c_neg = (1.0 - right_mass) * total / i_alpha(alpha_neg, sigma);
    return p;
}

void validate(const QuasiGaussianParams& p, double tol)
{
    if (!std::isfinite(p.a))
        throw std::domain_error("params: quasi-center must be finite");
    if (!(p.alpha_neg > -1.0) || !(p.alpha_pos > -1.0))
        throw std::domain_error("params: requires alpha > -1 on both sides");
    if (!(p.sigma > 0.0))
        throw std::domain_error("params: requires sigma > 0");
    if (!(p.c_neg >= 0.0) || !(p.c_pos >= 0.0))
        throw std::domain_error("params: requires c_neg, c_pos >= 0");
    if (!(p.c_neg + p.c_pos > 0.0))
        throw std::domain_error("params: requires c_neg + c_pos > 0");
    const double total = p.sigma * sqrt_two_pi();
    const double sum = p.c_neg * i_alpha(p.alpha_neg, p.sigma)
        + p.c_pos * i_alpha(p.alpha_pos, p.sigma);
    if (!(std::fabs(sum - total) <= tol * total))
        throw std::domain_error("params: normalization constraint violated");
}

double right_mass(const QuasiGaussianParams& p)
{
    if (p.c_pos == 0.0)
        return 0.0;
    return p.c_pos * i_alpha(p.alpha_pos, p.sigma) / (p.sigma * sqrt_two_pi());
}

double left_mass(const QuasiGaussianParams& p)
{
    if (p.c_neg == 0.0)
        return 0.0;
    return p.c_neg * i_alpha(p.alpha_neg, p.sigma) / (p.sigma * sqrt_two_pi());
}

double pdf(const QuasiGaussianParams& p, double x)
{
    const double d = x - p.a;
    if (d == 0.0) {
        const double l = center_limit(p.alpha_neg, p.c_neg, p.sigma);
        const double r = center_limit(p.alpha_pos, p.c_pos, p.sigma);
        if (std::isinf(l) || std::isinf(r))
            return kInf;
        return 0.5 * (l + r);
    }
    if (d > 0.0) {
        if (p.c_pos == 0.0)
            return 0.0;
        return p.c_pos * std::pow(d, p.alpha_pos) * gauss_kernel(d, p.sigma);
    }
    if (p.c_neg == 0.0)
        return 0.0;
    return p.c_neg * std::pow(-d, p.alpha_neg) * gauss_kernel(d, p.sigma);
}

double log_pdf(const QuasiGaussianParams& p, double x)
{
    const double d = x - p.a;
    if (d == 0.0)
        return std::log(pdf(p, x));
    const double c = d > 0.0 ? p.c_pos : p.c_neg;
    const double alpha = d > 0.0 ? p.alpha_pos : p.alpha_neg;
    if (c == 0.0)
        return -kInf;
    return std::log(c) + alpha * std::log(std::fabs(d))
        - d * d / (2.0 * p.sigma * p.sigma) - std::log(p.sigma * sqrt_two_pi());
}

double cdf(const QuasiGaussianParams& p, double x)
{
    const double lm = left_mass(p);
    const double d = x - p.a;
    if (d == 0.0)
        return lm;
    const double t = d * d / (2.0 * p.sigma * p.sigma);
    if (d > 0.0) {
        const double rm = 1.0 - lm;
        if (rm == 0.0)
            return 1.0;
        const double shape = 0.5 * (p.alpha_pos + 1.0);
        return std::min(1.0, lm + rm * reg_lower_gamma(shape, t));
    }
    if (lm == 0.0)
        return 0.0;
    const double shape = 0.5 * (p.alpha_neg + 1.0);
    return std::max(0.0, lm * (1.0 - reg_lower_gamma(shape, t)));
}

double quantile(const QuasiGaussianParams& p, double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile: requires 0 < u < 1");

    double lo = p.a - 8.0 * p.sigma;
    double hi = p.a + 8.0 * p.sigma;
    while (cdf(p, lo) > u)
        lo -= (p.a - lo);
    while (cdf(p, hi) < u)
        hi += (hi - p.a);

    const double tol = 1e-12 * std::max(1.0, std::fabs(p.a) + p.sigma);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break; // bracket collapsed to adjacent doubles
        if (cdf(p, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> sample(const QuasiGaussianParams& p, std::uint64_t seed, std::size_t n)
{
    std::vector<double> out;
    out.reserve(n);
    Rng rng(seed);
    const double rm = right_mass(p);
    const double shape_pos = 0.5 * (p.alpha_pos + 1.0);
    const double shape_neg = 0.5 * (p.alpha_neg + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool right = rng.uniform() < rm;
        const double g = rng.gamma(right ? shape_pos : shape_neg);
        const double d = p.sigma * std::sqrt(2.0 * g);
        out.push_back(p.a + (right ? d : -d));
    }
    return out;
}

double moment(const QuasiGaussianParams& p, SideMoment m)
{
    const auto side_integral = [&](double alpha, double c) {
        if (c == 0.0)
            return 0.0;
        if (!(alpha + m.p > -1.0))
            throw std::domain_error("moment: divergent, alpha + p <= -1");
        return c * i_alpha(alpha + m.p, p.sigma);
    };
    const double norm = p.sigma * sqrt_two_pi();
    switch (m.side) {
    case MomentSide::Positive:
        return side_integral(p.alpha_pos, p.c_pos) / norm;
    case MomentSide::Negative:
        return side_integral(p.alpha_neg, p.c_neg) / norm;
    case MomentSide::Absolute:
        return (side_integral(p.alpha_pos, p.c_pos) + side_integral(p.alpha_neg, p.c_neg)) / norm;
    case MomentSide::Signed:
        return (side_integral(p.alpha_pos, p.c_pos) - side_integral(p.alpha_neg, p.c_neg)) / norm;
    }
    throw std::domain_error("moment: unknown side");
}

double tail_asymptote(const QuasiGaussianParams& p, double y, TailSide side)
{
    if (!(y > 0.0))
        throw std::domain_error("tail_asymptote: requires y > 0");
    const double c = side == TailSide::Upper ? p.c_pos : p.c_neg;
    const double alpha = side == TailSide::Upper ? p.alpha_pos : p.alpha_neg;
    if (c == 0.0)
        return 0.0;
    return c * p.sigma / sqrt_two_pi() * std::pow(y, alpha - 1.0)
        * std::exp(-y * y / (2.0 * p.sigma * p.sigma));
}

} // namespace qg
