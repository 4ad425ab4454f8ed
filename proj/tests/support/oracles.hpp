#pragma once

// Test-only oracles, kept independent of the library's evaluation paths:
// quadrature goes through adaptive Simpson (not the series/continued
// fraction), log-gamma through std::lgamma (not the Lanczos kernel).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 48)
{
    if (a == b)
        return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

//! P(a, x) by quadrature. Substitutions keep the integrand smooth at 0:
//! for a < 1, gamma(a,x) = (1/a) int_0^{x^a} exp(-s^{1/a}) ds; for a >= 1
//! the piece near 0 uses t = u^2.
inline double reg_lower_gamma_quad(double a, double x)
{
    if (x <= 0.0)
        return 0.0;
    double lower;
    if (a < 1.0) {
        const double inv_a = 1.0 / a;
        lower = integrate([&](double s) { return std::exp(-std::pow(s, inv_a)); }, 0.0,
                          std::pow(x, a), 1e-14)
            / a;
    } else {
        const double split = std::min(1.0, x);
        lower = 2.0
            * integrate([&](double u) { return std::pow(u, 2.0 * a - 1.0) * std::exp(-u * u); },
                        0.0, std::sqrt(split), 1e-14);
        if (x > split)
            lower += integrate([&](double t) { return std::pow(t, a - 1.0) * std::exp(-t); },
                               split, x, 1e-14);
    }
    return lower * std::exp(-std::lgamma(a));
}

//! One-sided quasi-Gaussian partial moment by quadrature:
//! int_0^L u^{alpha+p} c exp(-u^2/(2 sigma^2)) / (sigma sqrt(2 pi)) du,
//! via u = t^2 so exponents down to -1/2 stay integrable.
inline double side_moment_quad(double c, double alpha, double sigma, double p, double L)
{
    if (c == 0.0)
        return 0.0;
    const double e = 2.0 * (alpha + p) + 1.0;
    const double norm = c / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const auto f = [&](double t) {
        return 2.0 * std::pow(t, e) * std::exp(-t * t * t * t / (2.0 * sigma * sigma));
    };
    return norm * integrate(f, 0.0, std::sqrt(L), 1e-13);
}

//! sup-distance between the empirical cdf of `samples` and `cdf`.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

//! Asymptotic one-sample critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n)
{
    return 1.6276236307187292 / std::sqrt(static_cast<double>(n));
}

//! erf by its Maclaurin series; converges fast for |z| <= 3.
inline double erf_series(double z)
{
    double term = z;
    double sum = z;
    for (int n = 1; n < 120; ++n) {
        term *= -z * z / n;
        sum += term / (2.0 * n + 1.0);
        if (std::fabs(term) < 1e-18)
            break;
    }
    return sum * 2.0 / std::sqrt(std::numbers::pi);
}

//! iterated adaptive Simpson over a rectangle
inline double integrate2d(const std::function<double(double, double)>& f, double ax,
                          double bx, double ay, double by, double tol = 1e-9)
{
    return integrate(
        [&](double x) {
            return integrate([&](double y) { return f(x, y); }, ay, by, tol * 0.1);
        },
        ax, bx, tol);
}

//! standard normal pdf/cdf for reference checks
inline double phi(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double Phi(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace oracles
