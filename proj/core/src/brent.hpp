#pragma once

#include <cmath>
#include <utility>

namespace qg::detail {

// Brent's localmin: golden-section search with parabolic acceleration.
// Minimizes f on [a, b] to absolute x-tolerance `tol`. Returns {x, f(x)}.
template <typename F>
std::pair<double, double> brent_minimize(F&& f, double a, double b, double tol,
                                         int max_iter = 120)
{
    constexpr double cgold = 0.3819660112501051;
    constexpr double zeps = 1e-18;

    double x = a + cgold * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol + 3e-12 * std::fabs(x) + zeps;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a))
            break;

        bool use_golden = true;
        if (std::fabs(e) > tol1) {
            // parabola through x, w, v
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0)
                p = -p;
            q = std::fabs(q);
            const double etemp = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * etemp) && p > q * (a - x)
                && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = std::copysign(tol1, xm - x);
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x >= xm) ? a - x : b - x;
            d = cgold * e;
        }

        const double u = (std::fabs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return { x, fx };
}

} // namespace qg::detail
