#include "qg/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "brent.hpp"
#include "qg/errors.hpp"
#include "qg/rng.hpp"
#include "qg/specfun.hpp"

namespace qg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBadObjective = -1e300;
constexpr double kMinWeight = 1e-6;
constexpr double kSigmaFloorFactor = 1e-8;

// ---------------------------------------------------------------------------
// shared model queries

std::size_t model_dimension(const MixtureModel& m)
{
    if (!m.components.empty())
        return m.components.front().model.coords.size();
    if (m.atom)
        return m.atom->location.size();
    return 0;
}

bool row_equals(std::span<const double> row, const std::vector<double>& v)
{
    if (row.size() != v.size())
        return false;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (row[j] != v[j])
            return false;
    return true;
}

// log of the continuous mixture density at one row; -inf when every
// component vanishes there.
double log_mixture_density(const MixtureModel& m, std::span<const double> x)
{
    double max_lp = -kInf;
    std::vector<double> lps(m.components.size(), -kInf);
    for (std::size_t k = 0; k < m.components.size(); ++k) {
        double lp = std::log(m.components[k].weight);
        for (std::size_t j = 0; j < x.size(); ++j)
            lp += log_pdf(m.components[k].model.coords[j], x[j]);
        lps[k] = lp;
        max_lp = std::max(max_lp, lp);
    }
    if (!(max_lp > -kInf))
        return -kInf;
    double acc = 0.0;
    for (double lp : lps)
        acc += std::exp(lp - max_lp);
    return max_lp + std::log(acc);
}

// ---------------------------------------------------------------------------
// EM working state: per-coordinate parameters in the search basis

struct CoordFit {
    double a = 0.0;
    double alpha_neg = 0.0;
    double alpha_pos = 0.0;
    double sigma = 1.0;
    double rm = 0.5; // right-side mass
};

double coord_log_pdf(const CoordFit& c, double x)
{
    const double d = x - c.a;
    const double inv2s2 = 1.0 / (2.0 * c.sigma * c.sigma);
    if (d > 0.0) {
        if (c.rm <= 0.0)
            return -kInf;
        return std::log(c.rm) - log_i_alpha(c.alpha_pos, c.sigma)
            + c.alpha_pos * std::log(d) - d * d * inv2s2;
    }
    if (d < 0.0) {
        if (c.rm >= 1.0)
            return -kInf;
        return std::log1p(-c.rm) - log_i_alpha(c.alpha_neg, c.sigma)
            + c.alpha_neg * std::log(-d) - d * d * inv2s2;
    }
    // exactly at the quasi-center
    double lim = 0.0;
    if (c.alpha_neg == 0.0 && c.rm < 1.0)
        lim += 0.5 * (1.0 - c.rm) * std::exp(-log_i_alpha(0.0, c.sigma));
    if (c.alpha_pos == 0.0 && c.rm > 0.0)
        lim += 0.5 * c.rm * std::exp(-log_i_alpha(0.0, c.sigma));
    return lim > 0.0 ? std::log(lim) : -kInf;
}

// responsibility-weighted sums split by the side of `a`
struct SideStats {
    double w = 0.0; // sum of weights
    double t = 0.0; // sum of w * log|x - a|
    double q = 0.0; // sum of w * (x - a)^2
};

struct SplitStats {
    SideStats left, right;
    double at_center = 0.0;
};

SplitStats split_stats(std::span<const double> xs, std::span<const double> rs, double a)
{
    SplitStats s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = rs[i];
        if (r <= 0.0)
            continue;
        const double d = xs[i] - a;
        if (d > 0.0) {
            s.right.w += r;
            s.right.t += r * std::log(d);
            s.right.q += r * d * d;
        } else if (d < 0.0) {
            s.left.w += r;
            s.left.t += r * std::log(-d);
            s.left.q += r * d * d;
        } else {
            s.at_center += r;
        }
    }
    return s;
}

// weighted log-likelihood contribution of one coordinate, as a function of
// the split statistics only; O(1) per evaluation once the stats are fixed
double stats_objective(const SplitStats& s, double alpha_neg, double alpha_pos,
                       double sigma, double rm)
{
    if (s.at_center > 0.0)
        return kBadObjective; // center sitting on a data point
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double val = 0.0;
    if (s.right.w > 0.0) {
        if (rm <= 0.0)
            return kBadObjective;
        val += s.right.w * (std::log(rm) - log_i_alpha(alpha_pos, sigma))
            + alpha_pos * s.right.t - s.right.q * inv2s2;
    }
    if (s.left.w > 0.0) {
        if (rm >= 1.0)
            return kBadObjective;
        val += s.left.w * (std::log1p(-rm) - log_i_alpha(alpha_neg, sigma))
            + alpha_neg * s.left.t - s.left.q * inv2s2;
    }
    return std::isfinite(val) ? val : kBadObjective;
}

// weighted quantiles of (xs, rs) where `order` sorts xs ascending
std::vector<double> weighted_quantiles(std::span<const double> xs,
                                       std::span<const double> rs,
                                       std::span<const std::size_t> order,
                                       std::span<const double> probs)
{
    double total = 0.0;
    for (double r : rs)
        total += std::max(r, 0.0);
    std::vector<double> out(probs.size(), xs[order.front()]);
    if (total <= 0.0)
        return out;
    double acc = 0.0;
    std::size_t qi = 0;
    for (std::size_t idx : order) {
        acc += std::max(rs[idx], 0.0);
        while (qi < probs.size() && acc >= probs[qi] * total)
            out[qi++] = xs[idx];
        if (qi == probs.size())
            break;
    }
    for (; qi < probs.size(); ++qi)
        out[qi] = xs[order.back()];
    return out;
}

struct CoordData {
    std::vector<double> values;       // one column of the data
    std::vector<std::size_t> order;   // ascending order of `values`
    double scale = 1.0;               // max - min, the pruning reference
};

// One M-step for a single coordinate of a single component: bounded
// derivative-free line searches over (a, alpha_neg, alpha_pos, log sigma,
// logit rm). Starts from the current parameters and only ever accepts
// improvements, which is what makes the EM iteration monotone.
void update_coordinate(const CoordData& cd, std::span<const double> rs, CoordFit& c,
                       const EmConfig& cfg, bool sigma_free)
{
    const auto& xs = cd.values;
    const bool alpha_free = cfg.alpha_max > cfg.alpha_min;
    if (!alpha_free) {
        c.alpha_neg = cfg.alpha_min;
        c.alpha_pos = cfg.alpha_min;
    }
    if (cfg.fix_right_mass)
        c.rm = *cfg.fix_right_mass;

    const auto obj_at = [&](double a) {
        return stats_objective(split_stats(xs, rs, a), c.alpha_neg, c.alpha_pos,
                               c.sigma, c.rm);
    };

    for (int sweep = 0; sweep < 2; ++sweep) {
        // quasi-center: scan quantile midpoints of the weighted sample, then
        // refine around the best candidate. The likelihood is multimodal and
        // non-smooth in `a` (the density vanishes or diverges exactly there),
        // so no derivatives anywhere near it.
        const double probs[] = { 0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95 };
        const auto qs = weighted_quantiles(xs, rs, cd.order, probs);
        std::vector<double> cands;
        for (std::size_t i = 0; i + 1 < qs.size(); ++i)
            cands.push_back(0.5 * (qs[i] + qs[i + 1]));
        cands.push_back(c.a);
        double best_a = c.a;
        double best_v = kBadObjective;
        for (double cand : cands) {
            const double v = obj_at(cand);
            if (v > best_v) {
                best_v = v;
                best_a = cand;
            }
        }
        const double spread = std::max(qs.back() - qs.front(), 1e-8 * cd.scale);
        const double atol = 1e-9 * std::max({ 1.0, cd.scale, std::fabs(best_a) });
        const auto [ar, av] = detail::brent_minimize(
            [&](double a) { return -obj_at(a); }, best_a - 0.75 * spread,
            best_a + 0.75 * spread, atol);
        if (-av > best_v) {
            best_a = ar;
            best_v = -av;
        }
        if (best_v > kBadObjective)
            c.a = best_a;

        SplitStats st = split_stats(xs, rs, c.a);

        if (alpha_free) {
            if (st.right.w > 0.0) {
                const auto [x, v] = detail::brent_minimize(
                    [&](double ap) { return -stats_objective(st, c.alpha_neg, ap, c.sigma, c.rm); },
                    cfg.alpha_min, cfg.alpha_max, 1e-8);
                if (-v >= stats_objective(st, c.alpha_neg, c.alpha_pos, c.sigma, c.rm))
                    c.alpha_pos = x;
            }
            if (st.left.w > 0.0) {
                const auto [x, v] = detail::brent_minimize(
                    [&](double an) { return -stats_objective(st, an, c.alpha_pos, c.sigma, c.rm); },
                    cfg.alpha_min, cfg.alpha_max, 1e-8);
                if (-v >= stats_objective(st, c.alpha_neg, c.alpha_pos, c.sigma, c.rm))
                    c.alpha_neg = x;
            }
        }

        if (sigma_free) {
            const double ls0 = std::log(c.sigma);
            const auto [x, v] = detail::brent_minimize(
                [&](double ls) {
                    return -stats_objective(st, c.alpha_neg, c.alpha_pos, std::exp(ls), c.rm);
                },
                ls0 - 4.0, ls0 + 4.0, 1e-11);
            if (-v >= stats_objective(st, c.alpha_neg, c.alpha_pos, c.sigma, c.rm))
                c.sigma = std::exp(x);
        }

        if (!cfg.fix_right_mass) {
            const auto logistic = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
            const auto [x, v] = detail::brent_minimize(
                [&](double lg) {
                    return -stats_objective(st, c.alpha_neg, c.alpha_pos, c.sigma, logistic(lg));
                },
                -16.0, 16.0, 1e-9);
            if (-v >= stats_objective(st, c.alpha_neg, c.alpha_pos, c.sigma, c.rm))
                c.rm = logistic(x);
        }
    }
}

// Shared-sigma pass: one line search over the common log sigma of every
// coordinate. The iterate enters with equal sigmas (enforced from the
// initialization on), so accepting only improvements keeps EM monotone
// within the constrained family.
void update_shared_sigma(const std::vector<CoordData>& cds, std::span<const double> rs,
                         std::vector<CoordFit>& coords)
{
    std::vector<SplitStats> sts;
    sts.reserve(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j)
        sts.push_back(split_stats(cds[j].values, rs, coords[j].a));

    const auto obj = [&](double s) {
        double val = 0.0;
        for (std::size_t j = 0; j < coords.size(); ++j)
            val += stats_objective(sts[j], coords[j].alpha_neg, coords[j].alpha_pos, s,
                                   coords[j].rm);
        return val;
    };
    const double ls0 = std::log(coords.front().sigma);
    const auto [x, v] = detail::brent_minimize(
        [&](double ls) { return -obj(std::exp(ls)); }, ls0 - 4.0, ls0 + 4.0, 1e-11);
    if (-v >= obj(coords.front().sigma))
        for (auto& c : coords)
            c.sigma = std::exp(x);
}

// k-means++ seeding followed by a few Lloyd iterations; returns assignment
std::vector<std::size_t> kmeans_assign(const Matrix& data, int k, Rng& rng)
{
    const std::size_t n = data.rows;
    const std::size_t d = data.cols;
    std::vector<std::vector<double>> centers;
    centers.reserve(k);

    const auto row_dist2 = [&](std::size_t i, const std::vector<double>& c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = data(i, j) - c[j];
            acc += diff * diff;
        }
        return acc;
    };

    const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    centers.emplace_back(data.row(std::min(pick, n - 1)).begin(),
                         data.row(std::min(pick, n - 1)).end());
    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = kInf;
            for (const auto& ctr : centers)
                best = std::min(best, row_dist2(i, ctr));
            d2[i] = best;
            total += best;
        }
        std::size_t idx;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            idx = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= u) {
                    idx = i;
                    break;
                }
            }
        } else {
            idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            idx = std::min(idx, n - 1);
        }
        centers.emplace_back(data.row(idx).begin(), data.row(idx).end());
    }

    std::vector<std::size_t> assign(n, 0);
    for (int pass = 0; pass < 5; ++pass) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = kInf;
            std::size_t arg = 0;
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const double v = row_dist2(i, centers[c]);
                if (v < best) {
                    best = v;
                    arg = c;
                }
            }
            assign[i] = arg;
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            std::vector<double> mean(d, 0.0);
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == c) {
                    ++cnt;
                    for (std::size_t j = 0; j < d; ++j)
                        mean[j] += data(i, j);
                }
            if (cnt > 0)
                for (std::size_t j = 0; j < d; ++j)
                    centers[c][j] = mean[j] / static_cast<double>(cnt);
        }
    }
    return assign;
}

struct EmRun {
    std::vector<double> weights;
    std::vector<std::vector<CoordFit>> comps; // [component][coordinate]
    std::vector<double> trace;
    bool converged = false;
    int pruned = 0;
};

EmRun run_em(const Matrix& data, const std::vector<CoordData>& cds, int k,
             std::uint64_t seed, const EmConfig& cfg, double atom_const)
{
    const std::size_t n = data.rows;
    const std::size_t d = data.cols;
    Rng rng(seed);

    EmRun run;
    const auto assign = kmeans_assign(data, k, rng);
    for (int c = 0; c < k; ++c) {
        std::vector<CoordFit> coords(d);
        std::size_t cnt = 0;
        std::vector<double> mean(d, 0.0), ss(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (assign[i] == static_cast<std::size_t>(c)) {
                ++cnt;
                for (std::size_t j = 0; j < d; ++j)
                    mean[j] += data(i, j);
            }
        if (cnt > 0)
            for (std::size_t j = 0; j < d; ++j)
                mean[j] /= static_cast<double>(cnt);
        for (std::size_t i = 0; i < n; ++i)
            if (assign[i] == static_cast<std::size_t>(c))
                for (std::size_t j = 0; j < d; ++j)
                    ss[j] += (data(i, j) - mean[j]) * (data(i, j) - mean[j]);
        for (std::size_t j = 0; j < d; ++j) {
            coords[j].a = mean[j];
            const double sd = cnt > 1 ? std::sqrt(ss[j] / static_cast<double>(cnt)) : 0.0;
            coords[j].sigma = std::max(sd, 1e-3 * cds[j].scale);
            coords[j].alpha_neg = std::clamp(0.0, cfg.alpha_min, cfg.alpha_max);
            coords[j].alpha_pos = coords[j].alpha_neg;
            coords[j].rm = cfg.fix_right_mass.value_or(0.5);
        }
        if (cfg.constrain_equal_sigma && d > 1) {
            double common = 0.0;
            for (const auto& cf : coords)
                common += cf.sigma * cf.sigma;
            common = std::sqrt(common / static_cast<double>(d));
            for (auto& cf : coords)
                cf.sigma = common;
        }
        run.comps.push_back(std::move(coords));
        run.weights.push_back(std::max<double>(static_cast<double>(cnt), 1.0)
                              / static_cast<double>(n));
    }
    {
        const double wsum = std::accumulate(run.weights.begin(), run.weights.end(), 0.0);
        for (auto& w : run.weights)
            w /= wsum;
    }

    Matrix resp(n, run.comps.size());
    std::vector<double> rcol(n);
    double ll_prev = -kInf;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // E-step
        const std::size_t nk = run.comps.size();
        double ll = 0.0;
        std::vector<double> lp(nk);
        for (std::size_t i = 0; i < n; ++i) {
            double mx = -kInf;
            for (std::size_t c = 0; c < nk; ++c) {
                double v = std::log(run.weights[c]);
                for (std::size_t j = 0; j < d; ++j)
                    v += coord_log_pdf(run.comps[c][j], data(i, j));
                lp[c] = v;
                mx = std::max(mx, v);
            }
            if (!(mx > -kInf) || !(mx < kInf))
                throw numerical_error("fit_em: row " + std::to_string(i)
                                      + " has no finite density under any component");
            double acc = 0.0;
            for (std::size_t c = 0; c < nk; ++c)
                acc += std::exp(lp[c] - mx);
            const double lse = mx + std::log(acc);
            for (std::size_t c = 0; c < nk; ++c)
                resp(i, c) = std::exp(lp[c] - lse);
            ll += lse;
        }
        run.trace.push_back(ll + atom_const);

        if (iter > 0 && run.trace[run.trace.size() - 1] - run.trace[run.trace.size() - 2]
                < cfg.loglik_tol
            && ll_prev > -kInf) {
            run.converged = true;
            break;
        }
        ll_prev = ll;

        // M-step
        for (std::size_t c = 0; c < nk; ++c) {
            double nc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                nc += resp(i, c);
            run.weights[c] = nc / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                rcol[i] = resp(i, c);
            const bool sigma_free = !(cfg.constrain_equal_sigma && d > 1);
            for (std::size_t j = 0; j < d; ++j)
                update_coordinate(cds[j], rcol, run.comps[c][j], cfg, sigma_free);
            if (!sigma_free)
                update_shared_sigma(cds, rcol, run.comps[c]);
        }

        // prune degenerate components
        for (std::size_t c = run.comps.size(); c-- > 0;) {
            bool degenerate = run.weights[c] < kMinWeight;
            for (std::size_t j = 0; j < d && !degenerate; ++j)
                degenerate = run.comps[c][j].sigma < kSigmaFloorFactor * cds[j].scale;
            if (degenerate) {
                run.comps.erase(run.comps.begin() + static_cast<std::ptrdiff_t>(c));
                run.weights.erase(run.weights.begin() + static_cast<std::ptrdiff_t>(c));
                ++run.pruned;
                ll_prev = -kInf; // model class changed; restart convergence test
            }
        }
        if (run.comps.empty())
            throw numerical_error("fit_em: every component degenerated");
        if (run.comps.size() != nk) {
            const double wsum = std::accumulate(run.weights.begin(), run.weights.end(), 0.0);
            for (auto& w : run.weights)
                w /= wsum;
            resp = Matrix(n, run.comps.size());
        }
    }
    return run;
}

} // namespace

// ---------------------------------------------------------------------------
// public mixture surface

std::size_t dimension(const MixtureModel& m)
{
    return model_dimension(m);
}

void validate(const MixtureModel& m)
{
    const std::size_t d = model_dimension(m);
    if (d == 0)
        throw std::domain_error("mixture: empty model");
    double total = 0.0;
    for (const auto& comp : m.components) {
        if (!(comp.weight > 0.0))
            throw std::domain_error("mixture: component weights must be positive");
        if (comp.model.coords.size() != d)
            throw std::domain_error("mixture: component dimensions differ");
        validate(comp.model);
        total += comp.weight;
    }
    if (m.atom) {
        if (!(m.atom->weight > 0.0))
            throw std::domain_error("mixture: atom weight must be positive");
        if (m.atom->location.size() != d)
            throw std::domain_error("mixture: atom dimension differs");
        total += m.atom->weight;
    } else if (m.components.empty()) {
        throw std::domain_error("mixture: needs at least one component or an atom");
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::domain_error("mixture: weights must sum to 1");
}

double mixture_pdf(const MixtureModel& m, std::span<const double> x)
{
    if (x.size() != model_dimension(m))
        throw std::invalid_argument("mixture_pdf: dimension mismatch");
    double acc = 0.0;
    for (const auto& comp : m.components)
        acc += comp.weight * joint_pdf(comp.model, x);
    return acc;
}

Matrix sample_mixture(const MixtureModel& m, std::uint64_t seed, std::size_t n)
{
    const std::size_t d = model_dimension(m);
    Matrix out(n, d);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        if (m.atom && (u < m.atom->weight || m.components.empty())) {
            for (std::size_t j = 0; j < d; ++j)
                out(i, j) = m.atom->location[j];
            continue;
        }
        if (m.atom)
            u -= m.atom->weight;
        std::size_t pick = m.components.size() - 1;
        double acc = 0.0;
        for (std::size_t k = 0; k < m.components.size(); ++k) {
            acc += m.components[k].weight;
            if (u < acc) {
                pick = k;
                break;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            const auto& p = m.components[pick].model.coords[j];
            const bool right = rng.uniform() < right_mass(p);
            const double g = rng.gamma(0.5 * ((right ? p.alpha_pos : p.alpha_neg) + 1.0));
            const double dx = p.sigma * std::sqrt(2.0 * g);
            out(i, j) = p.a + (right ? dx : -dx);
        }
    }
    return out;
}

LogLikelihood log_likelihood(const MixtureModel& m, const Matrix& data)
{
    if (data.rows > 0 && data.cols != model_dimension(m))
        throw std::invalid_argument("log_likelihood: dimension mismatch");
    LogLikelihood out;
    for (std::size_t i = 0; i < data.rows; ++i) {
        const auto row = data.row(i);
        if (m.atom && row_equals(row, m.atom->location)) {
            out.value += std::log(m.atom->weight);
            continue;
        }
        const double ld = log_mixture_density(m, row);
        if (!(ld > -kInf)) {
            out.value = -kInf;
            out.zero_density_row = i;
            return out;
        }
        out.value += ld;
    }
    return out;
}

Matrix responsibilities(const MixtureModel& m, const Matrix& data)
{
    const std::size_t d = model_dimension(m);
    if (data.rows > 0 && data.cols != d)
        throw std::invalid_argument("responsibilities: dimension mismatch");
    const std::size_t offset = m.atom ? 1 : 0;
    const std::size_t nk = m.components.size() + offset;
    Matrix resp(data.rows, nk);
    std::vector<double> lp(m.components.size());
    for (std::size_t i = 0; i < data.rows; ++i) {
        const auto row = data.row(i);
        if (m.atom && row_equals(row, m.atom->location)) {
            resp(i, 0) = 1.0;
            continue;
        }
        double mx = -kInf;
        for (std::size_t k = 0; k < m.components.size(); ++k) {
            double v = std::log(m.components[k].weight);
            for (std::size_t j = 0; j < d; ++j)
                v += log_pdf(m.components[k].model.coords[j], row[j]);
            lp[k] = v;
            mx = std::max(mx, v);
        }
        if (!(mx > -kInf))
            throw numerical_error("responsibilities: row " + std::to_string(i)
                                  + " has zero density under every component");
        double acc = 0.0;
        for (double v : lp)
            acc += std::exp(v - mx);
        const double lse = mx + std::log(acc);
        for (std::size_t k = 0; k < m.components.size(); ++k)
            resp(i, k + offset) = std::exp(lp[k] - lse);
    }
    return resp;
}

FitResult fit_em(const Matrix& data, int n_components, AtomPolicy atom_policy,
                 const EmConfig& config)
{
    if (n_components < 1)
        throw std::invalid_argument("fit_em: requires n_components >= 1");
    if (data.rows == 0 || data.cols == 0)
        throw std::invalid_argument("fit_em: empty data");
    if (data.rows < 10u * static_cast<std::size_t>(n_components) * data.cols)
        throw std::invalid_argument("fit_em: requires n >= 10 * n_components * d");
    if (!(config.max_iters >= 1) || !(config.loglik_tol > 0.0))
        throw std::invalid_argument("fit_em: requires max_iters >= 1 and loglik_tol > 0");
    if (!(config.alpha_min > -1.0) || !(config.alpha_max >= config.alpha_min))
        throw std::invalid_argument("fit_em: alpha bounds must satisfy -1 < min <= max");
    if (config.restarts < 1)
        throw std::invalid_argument("fit_em: requires restarts >= 1");
    for (double v : data.data)
        if (!std::isfinite(v))
            throw std::invalid_argument("fit_em: data must be finite");

    FitDiagnostics diag;

    // atom extraction: repeated bit-identical rows
    std::optional<MixtureAtom> atom;
    Matrix cont = data;
    if (atom_policy == AtomPolicy::DetectDuplicates) {
        std::map<std::vector<double>, std::size_t> counts;
        for (std::size_t i = 0; i < data.rows; ++i) {
            const auto row = data.row(i);
            counts[std::vector<double>(row.begin(), row.end())] += 1;
        }
        const std::size_t threshold = std::max<std::size_t>(
            5, static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(data.rows))));
        const std::vector<double>* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [row, cnt] : counts)
            if (cnt >= threshold && cnt > best_count) {
                best = &row;
                best_count = cnt;
            }
        if (best) {
            atom = MixtureAtom { static_cast<double>(best_count) / static_cast<double>(data.rows),
                                 *best };
            diag.atom_detected = true;
            Matrix rest(data.rows - best_count, data.cols);
            std::size_t r = 0;
            for (std::size_t i = 0; i < data.rows; ++i)
                if (!row_equals(data.row(i), *best)) {
                    for (std::size_t j = 0; j < data.cols; ++j)
                        rest(r, j) = data(i, j);
                    ++r;
                }
            cont = std::move(rest);
        }
    }

    // every row was the atom: a pure point mass is the fitted model
    if (atom && cont.rows == 0) {
        MixtureModel m;
        atom->weight = 1.0;
        m.atom = std::move(atom);
        diag.converged = true;
        diag.final_loglik = log_likelihood(m, data).value;
        FitResult res { std::move(m), std::move(diag) };
        return res;
    }
    if (cont.rows < 10u * static_cast<std::size_t>(n_components) * cont.cols)
        throw numerical_error("fit_em: too few rows left for the continuous fit after atom extraction");

    const double w0 = atom ? atom->weight : 0.0;
    double atom_const = 0.0;
    if (atom)
        atom_const = static_cast<double>(data.rows - cont.rows) * std::log(w0)
            + static_cast<double>(cont.rows) * std::log1p(-w0);

    std::vector<CoordData> cds(cont.cols);
    for (std::size_t j = 0; j < cont.cols; ++j) {
        cds[j].values = cont.column(j);
        cds[j].order.resize(cont.rows);
        std::iota(cds[j].order.begin(), cds[j].order.end(), 0);
        std::sort(cds[j].order.begin(), cds[j].order.end(),
                  [&](std::size_t a, std::size_t b) { return cds[j].values[a] < cds[j].values[b]; });
        const auto [mn, mx] = std::minmax_element(cds[j].values.begin(), cds[j].values.end());
        cds[j].scale = std::max(*mx - *mn, 1e-300);
    }

    std::optional<EmRun> best;
    for (int rs = 0; rs < config.restarts; ++rs) {
        EmRun run = run_em(cont, cds, n_components, derive_seed(config.seed, rs), config,
                           atom_const);
        diag.restart_logliks.push_back(run.trace.back());
        if (!best || run.trace.back() > best->trace.back())
            best = std::move(run);
    }

    diag.loglik_trace = best->trace;
    diag.iterations = static_cast<int>(best->trace.size());
    diag.converged = best->converged;
    diag.pruned_components = best->pruned;

    // deterministic component order: ascending first-coordinate center
    std::vector<std::size_t> order(best->comps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return best->comps[a][0].a < best->comps[b][0].a;
    });

    MixtureModel model;
    for (std::size_t k : order) {
        MixtureComponent comp;
        comp.weight = best->weights[k] * (1.0 - w0);
        for (const auto& c : best->comps[k])
            comp.model.coords.push_back(make_params(c.a, c.alpha_neg, c.alpha_pos, c.sigma, c.rm));
        comp.model.shared_sigma = config.constrain_equal_sigma;
        model.components.push_back(std::move(comp));
    }
    model.atom = atom;
    validate(model);

    diag.final_loglik = log_likelihood(model, data).value;
    FitResult res { std::move(model), std::move(diag) };
    return res;
}

} // namespace qg
