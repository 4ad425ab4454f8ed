#include "qg/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qg/errors.hpp"
#include "qg/rng.hpp"
#include "qg/specfun.hpp"

namespace qg {

namespace {

double chi_square_upper_tail(double stat, int dof)
{
    return 1.0 - reg_lower_gamma(0.5 * dof, 0.5 * stat);
}

double sample_sd(std::span<const double> xs)
{
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

double quantile_sorted(const std::vector<double>& sorted, double q)
{
    const auto n = sorted.size();
    const double pos = q * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= n)
        return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

} // namespace

IndependenceReport chi_square_independence(std::span<const PolarSample> samples,
                                           int radial_bins, int angular_bins,
                                           double level)
{
    if (radial_bins < 2 || angular_bins < 2)
        throw std::invalid_argument("chi_square_independence: requires >= 2 bins per axis");
    const std::size_t n = samples.size();
    if (n < 10u * static_cast<std::size_t>(radial_bins) * static_cast<std::size_t>(angular_bins))
        throw std::invalid_argument("chi_square_independence: insufficient samples for the grid");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("chi_square_independence: requires 0 < level < 1");

    // Equal-probability radial edges from empirical quantiles.
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i)
        rho[i] = samples[i].rho;
    std::sort(rho.begin(), rho.end());
    std::vector<double> edges(radial_bins - 1);
    for (int k = 1; k < radial_bins; ++k)
        edges[k - 1] = rho[(n * static_cast<std::size_t>(k)) / static_cast<std::size_t>(radial_bins)];

    const double width = 2.0 * std::numbers::pi / angular_bins;
    std::vector<double> table(static_cast<std::size_t>(radial_bins) * angular_bins, 0.0);
    for (const auto& s : samples) {
        const auto ri = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), s.rho) - edges.begin());
        auto ai = static_cast<std::size_t>(s.theta / width);
        if (ai >= static_cast<std::size_t>(angular_bins))
            ai = angular_bins - 1;
        table[ri * angular_bins + ai] += 1.0;
    }

    std::vector<double> row_sum(radial_bins, 0.0), col_sum(angular_bins, 0.0);
    for (int r = 0; r < radial_bins; ++r)
        for (int c = 0; c < angular_bins; ++c) {
            row_sum[r] += table[static_cast<std::size_t>(r) * angular_bins + c];
            col_sum[c] += table[static_cast<std::size_t>(r) * angular_bins + c];
        }
    for (double s : row_sum)
        if (s == 0.0)
            throw numerical_error("chi_square_independence: empty radial bin");
    for (double s : col_sum)
        if (s == 0.0)
            throw numerical_error("chi_square_independence: empty angular bin");

    double stat = 0.0;
    const auto total = static_cast<double>(n);
    for (int r = 0; r < radial_bins; ++r)
        for (int c = 0; c < angular_bins; ++c) {
            const double expected = row_sum[r] * col_sum[c] / total;
            const double diff = table[static_cast<std::size_t>(r) * angular_bins + c] - expected;
            stat += diff * diff / expected;
        }

    IndependenceReport rep;
    rep.statistic = stat;
    rep.dof = (radial_bins - 1) * (angular_bins - 1);
    rep.p_value = chi_square_upper_tail(stat, rep.dof);
    rep.n = n;
    rep.radial_bins = radial_bins;
    rep.angular_bins = angular_bins;
    rep.level = level;
    rep.dependence_detected = rep.p_value < level;
    return rep;
}

CharacterizationSummary verify_characterization_with(
    const std::function<void(std::uint64_t, std::size_t, std::vector<double>&,
                             std::vector<double>&)>& fill,
    const VerifyConfig& cfg)
{
    if (cfg.trials < 1 || cfg.n < 1)
        throw std::invalid_argument("verify_characterization: requires n, trials >= 1");

    CharacterizationSummary sum;
    sum.n = cfg.n;
    sum.trials = cfg.trials;
    sum.level = cfg.level;
    sum.radial_bins = cfg.radial_bins;
    sum.angular_bins = cfg.angular_bins;
    sum.seed = cfg.seed;

    std::vector<double> xs, ys;
    std::vector<PolarSample> polar;
    for (int t = 0; t < cfg.trials; ++t) {
        xs.clear();
        ys.clear();
        fill(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)), cfg.n, xs, ys);
        polar.clear();
        polar.reserve(cfg.n);
        for (std::size_t i = 0; i < cfg.n; ++i)
            polar.push_back(to_polar(xs[i], ys[i]));
        const auto rep = chi_square_independence(polar, cfg.radial_bins, cfg.angular_bins, cfg.level);
        if (rep.dependence_detected)
            ++sum.rejections;
    }
    sum.rejection_rate = static_cast<double>(sum.rejections) / cfg.trials;
    return sum;
}

CharacterizationSummary verify_characterization(const ProductQuasiGaussian& model,
                                                const VerifyConfig& cfg)
{
    validate(model);
    if (model.coords.size() != 2)
        throw std::invalid_argument("verify_characterization: requires a 2-D model");
    return verify_characterization_with(
        [&model](std::uint64_t seed, std::size_t n, std::vector<double>& xs,
                 std::vector<double>& ys) {
            const Matrix m = sample_vector(model, seed, n);
            xs.resize(n);
            ys.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] = m(i, 0);
                ys[i] = m(i, 1);
            }
        },
        cfg);
}

CharacterizationSummary verify_characterization_correlated(double corr,
                                                           const VerifyConfig& cfg)
{
    if (!(corr > -1.0 && corr < 1.0))
        throw std::invalid_argument("verify_characterization_correlated: requires |corr| < 1");
    const double mix = std::sqrt(1.0 - corr * corr);
    return verify_characterization_with(
        [corr, mix](std::uint64_t seed, std::size_t n, std::vector<double>& xs,
                    std::vector<double>& ys) {
            Rng rng(seed);
            xs.resize(n);
            ys.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double z1 = rng.normal();
                const double z2 = rng.normal();
                xs[i] = z1;
                ys[i] = corr * z1 + mix * z2;
            }
        },
        cfg);
}

RegularityEstimate estimate_regularity_degree(std::span<const double> samples,
                                              double window, double bandwidth)
{
    if (!(window > 0.0))
        throw std::invalid_argument("estimate_regularity_degree: requires window > 0");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("estimate_regularity_degree: requires bandwidth > 0");
    if (samples.size() < 1000)
        throw std::invalid_argument("estimate_regularity_degree: requires >= 1000 samples");

    std::size_t n_window = 0;
    for (double x : samples)
        if (x != 0.0 && std::fabs(x) < window)
            ++n_window;
    if (n_window < 100)
        throw std::invalid_argument(
            "estimate_regularity_degree: fewer than 100 samples inside the window");

    // Symmetric log-spaced grid. The inner edge stays a few bandwidths off
    // zero: closer in, the kernel smooths the |x|^mu profile flat and the
    // slope is meaningless. The outer edge stops short of the window so the
    // Gaussian envelope does not dominate the power behavior.
    constexpr int kGridPerSide = 24;
    const double lo = std::min(std::max(3.0 * bandwidth, window / 100.0), 0.3 * window);
    const double hi = 0.6 * window;
    if (!(lo < hi))
        throw numerical_error("estimate_regularity_degree: bandwidth too large for the window");

    std::vector<double> pts;
    pts.reserve(2 * kGridPerSide);
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (kGridPerSide - 1);
    for (int k = 0; k < kGridPerSide; ++k) {
        const double g = std::exp(log_lo + step * k);
        if (g < 0.5 * bandwidth)
            continue; // excluded: KDE boundary bias at the possible singularity
        pts.push_back(-g);
        pts.push_back(g);
    }

    const double kernel_norm = 1.0
        / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    double sxx = 0.0, sx = 0.0, sy = 0.0, sxy = 0.0;
    std::vector<double> lxs, lys;
    for (double p : pts) {
        double acc = 0.0;
        for (double x : samples) {
            const double z = (p - x) / bandwidth;
            if (std::fabs(z) < 8.0)
                acc += std::exp(-0.5 * z * z);
        }
        const double fhat = acc * kernel_norm;
        if (!(fhat > 0.0))
            continue;
        const double lx = std::log(std::fabs(p));
        const double ly = std::log(fhat);
        lxs.push_back(lx);
        lys.push_back(ly);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto m = static_cast<double>(lxs.size());
    if (lxs.size() < 6)
        throw numerical_error("estimate_regularity_degree: too few usable grid points");

    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / m;

    double ss_res = 0.0, ss_x = 0.0;
    const double mean_lx = sx / m;
    for (std::size_t i = 0; i < lxs.size(); ++i) {
        const double r = lys[i] - (intercept + slope * lxs[i]);
        ss_res += r * r;
        ss_x += (lxs[i] - mean_lx) * (lxs[i] - mean_lx);
    }

    RegularityEstimate est;
    est.mu_hat = slope;
    est.std_error = std::sqrt(ss_res / (m - 2.0) / ss_x);
    est.window = window;
    est.bandwidth = bandwidth;
    est.n_window = n_window;
    if (!(est.mu_hat > -1.0))
        throw numerical_error("estimate_regularity_degree: estimated degree <= -1, not a density profile");
    return est;
}

double default_degree_window(std::span<const double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("default_degree_window: empty sample");
    return 0.5 * sample_sd(samples);
}

double default_degree_bandwidth(std::span<const double> samples, double window)
{
    if (!(window > 0.0))
        throw std::invalid_argument("default_degree_bandwidth: requires window > 0");
    std::vector<double> inw;
    for (double x : samples)
        if (x != 0.0 && std::fabs(x) < window)
            inw.push_back(x);
    if (inw.size() < 2)
        throw std::invalid_argument("default_degree_bandwidth: no samples inside the window");
    std::sort(inw.begin(), inw.end());
    const double sd = sample_sd(inw);
    const double iqr = quantile_sorted(inw, 0.75) - quantile_sorted(inw, 0.25);
    double scale = sd;
    if (iqr > 0.0)
        scale = std::min(scale, iqr / 1.349);
    if (!(scale > 0.0))
        scale = window;
    // 0.35 * Silverman: tuned for log-log slope work near the origin.
    return 0.35 * 0.9 * scale * std::pow(static_cast<double>(inw.size()), -0.2);
}

} // namespace qg
