// qg: command-line front end for the quasi-Gaussian toolkit.
//
// Subcommands: sample, pdf, cdf, moments, fit, verify, degree. All output
// is reproducible byte-for-byte for a fixed seed. Errors print one JSON
// line on stderr; bad input exits 1, numerical failures exit 2.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qg/characterize.hpp"
#include "qg/errors.hpp"
#include "qg/io.hpp"
#include "qg/mixture.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty())
        std::cout << text;
    else
        qg::write_text_file(out_path, text);
}

qg::MixtureModel load_model(const std::string& path)
{
    return qg::model_from_json(qg::read_text_file(path));
}

const qg::QuasiGaussianParams& sole_univariate(const qg::MixtureModel& m,
                                               const char* what)
{
    if (m.components.size() != 1 || m.atom || m.components[0].model.coords.size() != 1)
        throw std::invalid_argument(std::string(what)
                                    + ": needs a single-component 1-D model without an atom");
    return m.components[0].model.coords[0];
}

std::pair<int, int> parse_bins(const std::string& spec)
{
    const auto comma = spec.find(',');
    try {
        if (comma == std::string::npos) {
            const int b = std::stoi(spec);
            return { b, b };
        }
        return { std::stoi(spec.substr(0, comma)), std::stoi(spec.substr(comma + 1)) };
    } catch (const std::exception&) {
        throw std::invalid_argument("--bins: expected N or R,A");
    }
}

// evaluation points for pdf/cdf: a CSV column or a uniform grid
std::vector<double> evaluation_points(const std::string& data_path, const std::string& column,
                                      double grid_min, double grid_max, int grid_points)
{
    if (!data_path.empty()) {
        const qg::Matrix m = qg::read_csv(data_path);
        std::size_t j = 0;
        if (!column.empty()) {
            try {
                j = static_cast<std::size_t>(std::stoul(column)) - 1;
            } catch (const std::exception&) {
                throw std::invalid_argument("--column: expected a 1-based column index");
            }
        }
        if (j >= m.cols)
            throw std::invalid_argument("--column: index out of range");
        return m.column(j);
    }
    if (grid_points < 2)
        throw std::invalid_argument("--grid-points: need at least 2");
    if (!(grid_min < grid_max))
        throw std::invalid_argument("--grid-min must be below --grid-max");
    std::vector<double> pts(grid_points);
    for (int i = 0; i < grid_points; ++i)
        pts[i] = grid_min + (grid_max - grid_min) * i / (grid_points - 1);
    return pts;
}

std::string curve_tsv(const std::vector<double>& xs, const std::vector<double>& ys)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += qg::format_double(xs[i]);
        out += '\t';
        out += qg::format_double(ys[i]);
        out += '\n';
    }
    return out;
}

double mixture_cdf_1d(const qg::MixtureModel& m, double x)
{
    double acc = 0.0;
    for (const auto& comp : m.components)
        acc += comp.weight * qg::cdf(comp.model.coords[0], x);
    if (m.atom && x >= m.atom->location[0])
        acc += m.atom->weight;
    return acc;
}

int run(int argc, char** argv)
{
    CLI::App app { "quasi-Gaussian distributions: sampling, evaluation, fitting, "
                   "and the polar-independence characterization harness" };
    app.require_subcommand(1);

    // ---- sample ----
    auto* sample_cmd = app.add_subcommand("sample", "draw rows from a model into CSV");
    std::string sample_model, sample_out;
    std::uint64_t sample_seed = kDefaultSeed;
    std::size_t sample_n = 1000;
    sample_cmd->add_option("--model", sample_model, "model JSON path")->required();
    sample_cmd->add_option("--n", sample_n, "number of rows");
    sample_cmd->add_option("--seed", sample_seed, "RNG seed (default 42)");
    sample_cmd->add_option("--out", sample_out, "output CSV path (default stdout)");

    // ---- pdf / cdf ----
    struct EvalArgs {
        std::string model, data, column, out;
        double grid_min = -8.0, grid_max = 8.0;
        int grid_points = 201;
    };
    EvalArgs pdf_args, cdf_args;
    const auto add_eval_options = [](CLI::App* cmd, EvalArgs& a) {
        cmd->add_option("--model", a.model, "model JSON path")->required();
        cmd->add_option("--data", a.data, "CSV of evaluation points (uses --column)");
        cmd->add_option("--column", a.column, "1-based CSV column (default 1)");
        cmd->add_option("--grid-min", a.grid_min, "grid start (default -8)");
        cmd->add_option("--grid-max", a.grid_max, "grid end (default 8)");
        cmd->add_option("--grid-points", a.grid_points, "grid size (default 201)");
        cmd->add_option("--out", a.out, "output TSV path (default stdout)");
    };
    auto* pdf_cmd = app.add_subcommand("pdf", "evaluate a 1-D density to TSV (x, value)");
    add_eval_options(pdf_cmd, pdf_args);
    auto* cdf_cmd = app.add_subcommand("cdf", "evaluate a 1-D distribution function to TSV");
    add_eval_options(cdf_cmd, cdf_args);

    // ---- moments ----
    auto* mom_cmd = app.add_subcommand("moments", "side moments of a univariate model as JSON");
    std::string mom_model, mom_out;
    mom_cmd->add_option("--model", mom_model, "model JSON path")->required();
    mom_cmd->add_option("--out", mom_out, "output JSON path (default stdout)");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "EM fit of a quasi-Gaussian mixture");
    std::string fit_data, fit_out, fit_diag, fit_atom = "none";
    int fit_components = 1;
    qg::EmConfig em;
    em.seed = kDefaultSeed;
    double fit_fix_rm = -1.0;
    fit_cmd->add_option("--data", fit_data, "input CSV path")->required();
    fit_cmd->add_option("--components", fit_components, "number of components")->required();
    fit_cmd->add_option("--seed", em.seed, "RNG seed (default 42)");
    fit_cmd->add_option("--atom", fit_atom, "atom policy: none | detect-duplicates");
    fit_cmd->add_option("--alpha-min", em.alpha_min, "side-exponent lower bound (default 0)");
    fit_cmd->add_option("--alpha-max", em.alpha_max, "side-exponent upper bound (default 8)");
    fit_cmd->add_option("--restarts", em.restarts, "seeded restarts (default 3)");
    fit_cmd->add_option("--max-iters", em.max_iters, "EM iteration cap (default 200)");
    fit_cmd->add_option("--tol", em.loglik_tol, "log-likelihood gain tolerance (default 1e-8)");
    fit_cmd->add_option("--fix-right-mass", fit_fix_rm, "pin P(X > a) instead of fitting it");
    fit_cmd->add_flag("--equal-sigma", em.constrain_equal_sigma,
                      "force one sigma across coordinates per component");
    fit_cmd->add_option("--out", fit_out, "model JSON path (default stdout)");
    fit_cmd->add_option("--diag", fit_diag, "diagnostics JSON path (model + trace)");

    // ---- verify ----
    auto* ver_cmd = app.add_subcommand(
        "verify", "Monte-Carlo polar-independence check of a 2-D product model");
    std::string ver_model, ver_out, ver_bins = "8";
    double sigma1 = 1.0, sigma2 = 1.0, alpha1 = 0.0, alpha2 = 0.0, rm1 = 0.5, rm2 = 0.5;
    double ver_rho = 0.0;
    qg::VerifyConfig vc;
    vc.seed = kDefaultSeed;
    ver_cmd->add_option("--model", ver_model, "2-D product model JSON (overrides the flags)");
    ver_cmd->add_option("--sigma1", sigma1, "quasi-standard of coordinate 1 (default 1)");
    ver_cmd->add_option("--sigma2", sigma2, "quasi-standard of coordinate 2 (default 1)");
    ver_cmd->add_option("--alpha1", alpha1, "degree of coordinate 1, both sides (default 0)");
    ver_cmd->add_option("--alpha2", alpha2, "degree of coordinate 2, both sides (default 0)");
    ver_cmd->add_option("--rm1", rm1, "right-side mass of coordinate 1 (default 0.5)");
    ver_cmd->add_option("--rm2", rm2, "right-side mass of coordinate 2 (default 0.5)");
    ver_cmd->add_option("--rho", ver_rho,
                        "correlated-Gaussian mode: correlation of the pair, |rho| < 1");
    ver_cmd->add_option("--n", vc.n, "samples per trial (default 5000)");
    ver_cmd->add_option("--trials", vc.trials, "number of trials (default 200)");
    ver_cmd->add_option("--level", vc.level, "test level (default 0.05)");
    ver_cmd->add_option("--bins", ver_bins, "contingency grid: N or R,A (default 8)");
    ver_cmd->add_option("--seed", vc.seed, "RNG seed (default 42)");
    ver_cmd->add_option("--out", ver_out, "report JSON path (default stdout)");

    // ---- degree ----
    auto* deg_cmd = app.add_subcommand("degree", "regularity degree of a sample near a center");
    std::string deg_data, deg_column, deg_out;
    double deg_center = 0.0, deg_window = 0.0, deg_bandwidth = 0.0;
    deg_cmd->add_option("--data", deg_data, "input CSV path")->required();
    deg_cmd->add_option("--column", deg_column, "1-based CSV column (default 1)");
    deg_cmd->add_option("--center", deg_center, "center to shift to the origin (default 0)");
    deg_cmd->add_option("--window", deg_window, "half-width around the origin (default 0.5 sd)");
    deg_cmd->add_option("--bandwidth", deg_bandwidth, "KDE bandwidth (default plug-in rule)");
    deg_cmd->add_option("--out", deg_out, "report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints the help text, exits 0
    } catch (const CLI::ParseError& e) {
        std::cerr << nlohmann::json { { "error", e.what() }, { "kind", "input" } }.dump() << "\n";
        return 1;
    }

    if (sample_cmd->parsed()) {
        const auto model = load_model(sample_model);
        const qg::Matrix rows = qg::sample_mixture(model, sample_seed, sample_n);
        emit(qg::csv_to_string(rows), sample_out);
        return 0;
    }

    if (pdf_cmd->parsed() || cdf_cmd->parsed()) {
        const bool is_pdf = pdf_cmd->parsed();
        const EvalArgs& a = is_pdf ? pdf_args : cdf_args;
        const auto model = load_model(a.model);
        if (qg::dimension(model) != 1)
            throw std::invalid_argument("pdf/cdf: needs a 1-D model");
        const auto xs = evaluation_points(a.data, a.column, a.grid_min, a.grid_max, a.grid_points);
        std::vector<double> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys[i] = is_pdf ? qg::mixture_pdf(model, std::span(&xs[i], 1))
                           : mixture_cdf_1d(model, xs[i]);
        emit(curve_tsv(xs, ys), a.out);
        return 0;
    }

    if (mom_cmd->parsed()) {
        const auto model = load_model(mom_model);
        const auto& p = sole_univariate(model, "moments");
        const auto side = [&](double order, qg::MomentSide s) {
            return qg::moment(p, { order, s });
        };
        nlohmann::json j {
            { "a", p.a },
            { "sigma", p.sigma },
            { "alpha_neg", p.alpha_neg },
            { "alpha_pos", p.alpha_pos },
            { "right_mass", qg::right_mass(p) },
            { "mean", p.a + side(1.0, qg::MomentSide::Signed) },
            { "mean_abs_deviation", side(1.0, qg::MomentSide::Absolute) },
            { "second_moment", side(2.0, qg::MomentSide::Absolute) },
            { "e_pos_p1", side(1.0, qg::MomentSide::Positive) },
            { "e_neg_p1", side(1.0, qg::MomentSide::Negative) },
            { "e_pos_p2", side(2.0, qg::MomentSide::Positive) },
            { "e_neg_p2", side(2.0, qg::MomentSide::Negative) },
        };
        emit(j.dump(2) + "\n", mom_out);
        return 0;
    }

    if (fit_cmd->parsed()) {
        if (fit_fix_rm >= 0.0) {
            if (fit_fix_rm > 1.0)
                throw std::invalid_argument("--fix-right-mass: needs a value in [0, 1]");
            em.fix_right_mass = fit_fix_rm;
        }
        qg::AtomPolicy policy;
        if (fit_atom == "none")
            policy = qg::AtomPolicy::None;
        else if (fit_atom == "detect-duplicates")
            policy = qg::AtomPolicy::DetectDuplicates;
        else
            throw std::invalid_argument("--atom: expected none or detect-duplicates");
        const qg::Matrix data = qg::read_csv(fit_data);
        const qg::FitResult res = qg::fit_em(data, fit_components, policy, em);
        emit(qg::to_json(res.model), fit_out);
        if (!fit_diag.empty())
            qg::write_text_file(fit_diag, qg::to_json(res));
        return 0;
    }

    if (ver_cmd->parsed()) {
        const auto [rb, ab] = parse_bins(ver_bins);
        vc.radial_bins = rb;
        vc.angular_bins = ab;
        qg::CharacterizationSummary summary;
        if (ver_rho != 0.0) {
            summary = qg::verify_characterization_correlated(ver_rho, vc);
        } else if (!ver_model.empty()) {
            const auto model = load_model(ver_model);
            if (model.components.size() != 1 || model.atom)
                throw std::invalid_argument("verify: needs a single-component product model");
            summary = qg::verify_characterization(model.components[0].model, vc);
        } else {
            const auto coord1 = qg::make_params(0.0, alpha1, alpha1, sigma1, rm1);
            const auto coord2 = qg::make_params(0.0, alpha2, alpha2, sigma2, rm2);
            summary = qg::verify_characterization(qg::make_product({ coord1, coord2 }), vc);
        }
        emit(qg::to_json(summary), ver_out);
        return 0;
    }

    if (deg_cmd->parsed()) {
        const qg::Matrix data = qg::read_csv(deg_data);
        std::size_t j = 0;
        if (!deg_column.empty()) {
            try {
                j = static_cast<std::size_t>(std::stoul(deg_column)) - 1;
            } catch (const std::exception&) {
                throw std::invalid_argument("--column: expected a 1-based column index");
            }
        }
        if (j >= data.cols)
            throw std::invalid_argument("--column: index out of range");
        std::vector<double> xs = data.column(j);
        if (deg_center != 0.0)
            for (auto& x : xs)
                x -= deg_center;
        const double window = deg_window > 0.0 ? deg_window : qg::default_degree_window(xs);
        const double bandwidth = deg_bandwidth > 0.0
            ? deg_bandwidth
            : qg::default_degree_bandwidth(xs, window);
        const auto est = qg::estimate_regularity_degree(xs, window, bandwidth);
        emit(qg::to_json(est), deg_out);
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const qg::numerical_error& e) {
        std::cerr << nlohmann::json { { "error", e.what() }, { "kind", "numerical" } }.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json { { "error", e.what() }, { "kind", "input" } }.dump() << "\n";
        return 1;
    }
}
