#include "qg/multivar.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qg/rng.hpp"

namespace qg {

ProductQuasiGaussian make_product(std::vector<QuasiGaussianParams> coords,
                                  bool require_shared_sigma)
{
    ProductQuasiGaussian m;
    m.coords = std::move(coords);
    m.shared_sigma = require_shared_sigma;
    validate(m);
    return m;
}

void validate(const ProductQuasiGaussian& m)
{
    if (m.coords.empty())
        throw std::domain_error("product: requires dimension >= 1");
    for (const auto& c : m.coords)
        validate(c);
    if (m.shared_sigma) {
        const double s0 = m.coords.front().sigma;
        for (const auto& c : m.coords)
            if (std::fabs(c.sigma - s0) > 1e-12 * s0)
                throw std::domain_error("product: shared_sigma set but sigmas differ");
    }
}

double joint_pdf(const ProductQuasiGaussian& m, std::span<const double> x)
{
    if (x.size() != m.coords.size())
        throw std::invalid_argument("joint_pdf: dimension mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < m.coords.size(); ++j)
        prod *= pdf(m.coords[j], x[j]);
    return prod;
}

Matrix sample_vector(const ProductQuasiGaussian& m, std::uint64_t seed, std::size_t n)
{
    const std::size_t d = m.coords.size();
    Matrix out(n, d);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto& p = m.coords[j];
            const bool right = rng.uniform() < right_mass(p);
            const double g = rng.gamma(0.5 * ((right ? p.alpha_pos : p.alpha_neg) + 1.0));
            const double dx = p.sigma * std::sqrt(2.0 * g);
            out(i, j) = p.a + (right ? dx : -dx);
        }
    }
    return out;
}

PolarSample to_polar(double x, double y)
{
    if (x == 0.0 && y == 0.0)
        throw std::domain_error("to_polar: angle undefined at the origin");
    PolarSample s;
    s.rho = std::hypot(x, y);
    s.theta = std::atan2(y, x);
    if (s.theta < 0.0)
        s.theta += 2.0 * std::numbers::pi;
    if (s.theta >= 2.0 * std::numbers::pi)
        s.theta = 0.0; // atan2 rounding at the branch cut
    return s;
}

double polar_rect_probability(double sigma, double r, double phi)
{
    if (!(sigma > 0.0))
        throw std::domain_error("polar_rect_probability: requires sigma > 0");
    if (!(r > 0.0))
        throw std::domain_error("polar_rect_probability: requires r > 0");
    if (!(phi > 0.0 && phi <= 2.0 * std::numbers::pi))
        throw std::domain_error("polar_rect_probability: requires 0 < phi <= 2 pi");
    return phi / (2.0 * std::numbers::pi) * (1.0 - std::exp(-r * r / (2.0 * sigma * sigma)));
}

Spherical to_spherical(std::span<const double> x)
{
    const std::size_t d = x.size();
    if (d < 3)
        throw std::invalid_argument("to_spherical: requires dimension >= 3 (use to_polar for d = 2)");

    // tail[k] = sqrt(x_k^2 + ... + x_{d-1}^2)
    std::vector<double> tail(d + 1, 0.0);
    for (std::size_t k = d; k-- > 0;)
        tail[k] = std::hypot(x[k], tail[k + 1]);
    if (tail[0] == 0.0)
        throw std::domain_error("to_spherical: undefined at the origin");

    Spherical s;
    s.radius = tail[0];
    s.angles.resize(d - 1);
    for (std::size_t k = 0; k + 2 < d; ++k)
        s.angles[k] = std::atan2(tail[k + 1], x[k]); // in [0, pi]
    double last = std::atan2(x[d - 1], x[d - 2]);
    if (last < 0.0)
        last += 2.0 * std::numbers::pi;
    s.angles[d - 2] = last;
    return s;
}

std::vector<double> from_spherical(const Spherical& s)
{
    const std::size_t d = s.angles.size() + 1;
    if (d < 3)
        throw std::invalid_argument("from_spherical: requires dimension >= 3");
    std::vector<double> x(d);
    double sin_prod = s.radius;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        x[k] = sin_prod * std::cos(s.angles[k]);
        sin_prod *= std::sin(s.angles[k]);
    }
    x[d - 1] = sin_prod;
    return x;
}

} // namespace qg
