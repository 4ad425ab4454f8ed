#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qg/multivar.hpp"

namespace qg {

//! Result of a chi-square test of independence between radius and angle.
struct IndependenceReport {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t n = 0;
    int radial_bins = 0;
    int angular_bins = 0;
    double level = 0.05;
    bool dependence_detected = false;

    std::string decision() const
    {
        return dependence_detected ? "dependence-detected" : "consistent-with-independence";
    }
};

//! Contingency-table chi-square on equal-probability radial bins (edges from
//! empirical quantiles of rho) times equal-width angular bins. The p-value is
//! the upper chi-square tail with dof = (radial_bins - 1)(angular_bins - 1).
//!
//! Preconditions: bins >= 2 each and n >= 10 * radial_bins * angular_bins
//! (std::invalid_argument otherwise). An empty marginal bin raises
//! numerical_error; equal-probability radial binning makes that possible
//! only under heavy ties in rho.
IndependenceReport chi_square_independence(std::span<const PolarSample> samples,
                                           int radial_bins, int angular_bins,
                                           double level = 0.05);

struct VerifyConfig {
    std::size_t n = 5000;
    int trials = 200;
    std::uint64_t seed = 42;
    double level = 0.05;
    int radial_bins = 8;
    int angular_bins = 8;
};

struct CharacterizationSummary {
    std::size_t n = 0;
    int trials = 0;
    double level = 0.05;
    int radial_bins = 0;
    int angular_bins = 0;
    std::uint64_t seed = 0;
    int rejections = 0;
    double rejection_rate = 0.0;
};

//! Monte-Carlo check of the polar-independence characterization for a 2-D
//! product model: per trial, sample n vectors, map to polar coordinates and
//! run chi_square_independence; reports the rejection fraction at the given
//! level. Equal sigmas should reject at about the level itself; unequal
//! sigmas should reject nearly always.
CharacterizationSummary verify_characterization(const ProductQuasiGaussian& model,
                                                const VerifyConfig& cfg);

//! Same harness for the centered correlated Gaussian pair
//! (Z1, corr Z1 + sqrt(1 - corr^2) Z2); nonzero correlation makes the polar
//! coordinates dependent. Requires |corr| < 1.
CharacterizationSummary verify_characterization_correlated(double corr,
                                                           const VerifyConfig& cfg);

//! Harness core shared by the entry points above: `fill` must write n
//! Cartesian pairs for the trial seed it is given.
CharacterizationSummary verify_characterization_with(
    const std::function<void(std::uint64_t seed, std::size_t n,
                             std::vector<double>& xs, std::vector<double>& ys)>& fill,
    const VerifyConfig& cfg);

//! Estimated regularity degree: the exponent mu such that the density
//! behaves like |x|^mu near the origin.
struct RegularityEstimate {
    double mu_hat = 0.0;
    double std_error = 0.0;
    double window = 0.0;
    double bandwidth = 0.0;
    std::size_t n_window = 0; //!< samples inside (-window, window) \ {0}
};

//! Gaussian-kernel density estimate on a symmetric log-spaced grid inside
//! (-window, window); mu_hat is the least-squares slope of log f-hat against
//! log |x| with its regression standard error. Grid points closer to zero
//! than bandwidth/2 are excluded (the kernel cannot resolve the possible
//! singularity there). Preconditions: >= 1000 samples overall and >= 100
//! inside the window.
RegularityEstimate estimate_regularity_degree(std::span<const double> samples,
                                              double window, double bandwidth);

//! Default window: half the sample standard deviation.
double default_degree_window(std::span<const double> samples);

//! Default bandwidth: Silverman's reference rule on the in-window samples,
//! scaled down for slope estimation (the global-MISE bandwidth oversmooths
//! the near-origin region the degree lives in).
double default_degree_bandwidth(std::span<const double> samples, double window);

} // namespace qg
