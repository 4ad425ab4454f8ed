#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qg/matrix.hpp"
#include "qg/qgauss.hpp"

namespace qg {

//! Product-form multivariate quasi-Gaussian: independent coordinates, each
//! with its own parameter set. `shared_sigma` records the modeling choice
//! that all quasi-standards are equal; it is asserted at construction, not
//! inferred from data.
struct ProductQuasiGaussian {
    std::vector<QuasiGaussianParams> coords;
    bool shared_sigma = false;
};

//! Validates every coordinate and, when `require_shared_sigma` is set,
//! checks the sigmas agree within 1e-12 relative.
ProductQuasiGaussian make_product(std::vector<QuasiGaussianParams> coords,
                                  bool require_shared_sigma = false);

void validate(const ProductQuasiGaussian& m);

//! Joint density: product of the coordinate densities.
double joint_pdf(const ProductQuasiGaussian& m, std::span<const double> x);

//! n rows of i.i.d. vectors with mutually independent columns.
//! Deterministic per seed.
Matrix sample_vector(const ProductQuasiGaussian& m, std::uint64_t seed, std::size_t n);

//! Polar image of a 2-D Cartesian sample.
struct PolarSample {
    double rho = 0.0;   //!< radius, >= 0
    double theta = 0.0; //!< full-plane angle in [0, 2 pi)
};

//! rho = sqrt(x^2 + y^2), theta = four-quadrant angle in [0, 2 pi).
//! The origin has no well-defined angle and throws std::domain_error,
//! so no degenerate point can silently enter a downstream test.
PolarSample to_polar(double x, double y);

//! Closed form for the isotropic centered Gaussian case:
//!   P(rho < r, theta < phi) = (phi / (2 pi)) * (1 - exp(-r^2 / (2 sigma^2))).
//! Requires sigma, r > 0 and 0 < phi <= 2 pi.
double polar_rect_probability(double sigma, double r, double phi);

//! Hyperspherical coordinates for d >= 3: angles[0..d-3] lie in [0, pi],
//! the last angle in [0, 2 pi).
struct Spherical {
    double radius = 0.0;
    std::vector<double> angles;
};

Spherical to_spherical(std::span<const double> x);
std::vector<double> from_spherical(const Spherical& s);

} // namespace qg
