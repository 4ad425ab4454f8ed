#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qg/matrix.hpp"
#include "qg/multivar.hpp"

namespace qg {

struct MixtureComponent {
    double weight = 1.0;
    ProductQuasiGaussian model;
};

//! Discrete component: P(X = location) = weight.
struct MixtureAtom {
    double weight = 0.0;
    std::vector<double> location;
};

//! Convex combination of product quasi-Gaussian components, optionally with
//! a point mass. Weights (including the atom's) sum to one.
struct MixtureModel {
    std::vector<MixtureComponent> components;
    std::optional<MixtureAtom> atom;
};

std::size_t dimension(const MixtureModel& m);
void validate(const MixtureModel& m);

//! Continuous part of the density: sum of weighted component joint pdfs.
//! The atom carries probability, not density, and does not contribute.
double mixture_pdf(const MixtureModel& m, std::span<const double> x);

//! n rows, deterministic per seed. The component index (atom included) is
//! drawn from the weights; atom draws emit the atom location exactly.
Matrix sample_mixture(const MixtureModel& m, std::uint64_t seed, std::size_t n);

struct LogLikelihood {
    double value = 0.0;
    //! set when some row has zero density under every component (value is
    //! then -inf)
    std::optional<std::size_t> zero_density_row;
};

//! Sum of per-row log densities. Rows bitwise-equal to the atom location
//! contribute log(atom weight); all other rows contribute the log of the
//! continuous mixture density.
LogLikelihood log_likelihood(const MixtureModel& m, const Matrix& data);

//! E-step responsibilities r[i][k] proportional to W_k * pdf_k(row i),
//! normalized per row. Rows equal to the atom location get all mass on the
//! atom column (column 0 when an atom is present).
Matrix responsibilities(const MixtureModel& m, const Matrix& data);

enum class AtomPolicy {
    None,
    DetectDuplicates, //!< bit-identical repeated rows become the atom
};

struct EmConfig {
    int max_iters = 200;
    double loglik_tol = 1e-8;  //!< absolute log-likelihood gain to keep iterating
    double alpha_min = 0.0;    //!< side-exponent lower bound during fitting
    double alpha_max = 8.0;    //!< side-exponent upper bound during fitting
    int restarts = 3;          //!< seeded initializations; best final fit wins
    std::uint64_t seed = 42;
    //! Pin P(X > a) per coordinate instead of fitting it. Required to
    //! reproduce the plain Gaussian MLE exactly (alpha bounds [0, 0] with
    //! fix_right_mass = 0.5): leaving the mass free fits a split normal
    //! whose optimum sits O(1/n) away from the Gaussian one.
    std::optional<double> fix_right_mass;
    //! Force one shared sigma across coordinates within each component.
    bool constrain_equal_sigma = false;
};

struct FitDiagnostics {
    std::vector<double> loglik_trace;    //!< best restart, one entry per iteration
    std::vector<double> restart_logliks; //!< final log-likelihood per restart
    int iterations = 0;
    bool converged = false;
    int pruned_components = 0;
    bool atom_detected = false;
    double final_loglik = 0.0;
};

struct FitResult {
    MixtureModel model;
    FitDiagnostics diagnostics;
};

//! EM fit of an n_components mixture. The M-step updates weights in closed
//! form and each coordinate's (a, alpha_neg, alpha_pos, sigma, right-mass)
//! by bounded derivative-free line searches; the update never decreases the
//! EM objective, so the log-likelihood trace is nondecreasing. Components
//! whose weight falls below 1e-6 or whose sigma collapses below 1e-8 of the
//! data scale are pruned and counted in the diagnostics; losing every
//! component raises numerical_error. Deterministic given (data, config).
//!
//! Requires data.rows >= 10 * n_components * data.cols.
FitResult fit_em(const Matrix& data, int n_components, AtomPolicy atom_policy,
                 const EmConfig& config);

} // namespace qg
