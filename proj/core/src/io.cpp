#include "qg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

using nlohmann::json;

namespace qg {

namespace {

double parse_field(const std::string& field, std::size_t line_no)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("csv: unparsable number '" + field + "' on line "
                                    + std::to_string(line_no));
    }
    while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\r'))
        ++pos;
    if (pos != field.size())
        throw std::invalid_argument("csv: trailing junk in '" + field + "' on line "
                                    + std::to_string(line_no));
    return v;
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

json params_to_json(const QuasiGaussianParams& p)
{
    return json {
        { "a", p.a },
        { "alpha_neg", p.alpha_neg },
        { "alpha_pos", p.alpha_pos },
        { "sigma", p.sigma },
        { "c_neg", p.c_neg },
        { "c_pos", p.c_pos },
    };
}

QuasiGaussianParams params_from(const json& j)
{
    QuasiGaussianParams p;
    p.a = j.at("a").get<double>();
    p.alpha_neg = j.at("alpha_neg").get<double>();
    p.alpha_pos = j.at("alpha_pos").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.c_neg = j.at("c_neg").get<double>();
    p.c_pos = j.at("c_pos").get<double>();
    try {
        validate(p, 1e-9); // looser than construction: JSON numbers may be hand-written
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("model json rejected: ") + e.what());
    }
    return p;
}

json product_to_json(const ProductQuasiGaussian& m)
{
    json coords = json::array();
    for (const auto& c : m.coords)
        coords.push_back(params_to_json(c));
    return json { { "coords", coords }, { "shared_sigma", m.shared_sigma } };
}

ProductQuasiGaussian product_from(const json& j)
{
    std::vector<QuasiGaussianParams> coords;
    for (const auto& c : j.at("coords"))
        coords.push_back(params_from(c));
    const bool shared = j.value("shared_sigma", false);
    return make_product(std::move(coords), shared);
}

json mixture_to_json(const MixtureModel& m)
{
    json comps = json::array();
    for (const auto& c : m.components)
        comps.push_back(json { { "weight", c.weight }, { "coords", product_to_json(c.model).at("coords") },
                               { "shared_sigma", c.model.shared_sigma } });
    json out { { "components", comps } };
    if (m.atom)
        out["atom"] = json { { "w0", m.atom->weight }, { "a0", m.atom->location } };
    else
        out["atom"] = nullptr;
    return out;
}

MixtureModel mixture_from(const json& j)
{
    MixtureModel m;
    for (const auto& c : j.at("components")) {
        MixtureComponent comp;
        comp.weight = c.at("weight").get<double>();
        json prod { { "coords", c.at("coords") }, { "shared_sigma", c.value("shared_sigma", false) } };
        comp.model = product_from(prod);
        m.components.push_back(std::move(comp));
    }
    if (j.contains("atom") && !j.at("atom").is_null()) {
        MixtureAtom atom;
        atom.weight = j.at("atom").at("w0").get<double>();
        atom.location = j.at("atom").at("a0").get<std::vector<double>>();
        m.atom = std::move(atom);
    }
    try {
        validate(m);
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("model json rejected: ") + e.what());
    }
    return m;
}

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid json: ") + e.what());
    }
}

} // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_to_string(const Matrix& m, const std::vector<std::string>& column_names)
{
    if (!column_names.empty() && column_names.size() != m.cols)
        throw std::invalid_argument("csv: column name count does not match");
    std::string out;
    for (std::size_t j = 0; j < m.cols; ++j) {
        if (j)
            out += ',';
        out += column_names.empty() ? "x" + std::to_string(j + 1) : column_names[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j)
                out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const Matrix& m,
               const std::vector<std::string>& column_names)
{
    write_text_file(path, csv_to_string(m, column_names));
}

Matrix csv_from_string(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("csv: empty input");
    const auto header = split_line(line);
    const std::size_t cols = header.size();
    if (cols == 0 || header.front().empty())
        throw std::invalid_argument("csv: missing header row");

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_line(line);
        if (fields.size() != cols)
            throw std::invalid_argument("csv: ragged row on line " + std::to_string(line_no));
        for (const auto& f : fields)
            values.push_back(parse_field(f, line_no));
        ++rows;
    }
    Matrix m(rows, cols);
    m.data = std::move(values);
    return m;
}

Matrix read_csv(const std::string& path)
{
    return csv_from_string(read_text_file(path));
}

std::string to_json(const QuasiGaussianParams& p)
{
    return params_to_json(p).dump(2) + "\n";
}

std::string to_json(const ProductQuasiGaussian& m)
{
    return product_to_json(m).dump(2) + "\n";
}

std::string to_json(const MixtureModel& m)
{
    return mixture_to_json(m).dump(2) + "\n";
}

std::string to_json(const IndependenceReport& r)
{
    const json j {
        { "statistic", r.statistic },
        { "dof", r.dof },
        { "p_value", r.p_value },
        { "n", r.n },
        { "bins", json::array({ r.radial_bins, r.angular_bins }) },
        { "decision", r.decision() },
        { "level", r.level },
    };
    return j.dump(2) + "\n";
}

std::string to_json(const CharacterizationSummary& s)
{
    const json j {
        { "n", s.n },
        { "trials", s.trials },
        { "level", s.level },
        { "bins", json::array({ s.radial_bins, s.angular_bins }) },
        { "seed", s.seed },
        { "rejections", s.rejections },
        { "rejection_rate", s.rejection_rate },
    };
    return j.dump(2) + "\n";
}

std::string to_json(const RegularityEstimate& e)
{
    const json j {
        { "mu_hat", e.mu_hat },
        { "std_error", e.std_error },
        { "window", e.window },
        { "bandwidth", e.bandwidth },
        { "n_window", e.n_window },
    };
    return j.dump(2) + "\n";
}

std::string to_json(const FitResult& f)
{
    const json j {
        { "model", parse(to_json(f.model)) },
        { "diagnostics",
          json {
              { "loglik_trace", f.diagnostics.loglik_trace },
              { "restart_logliks", f.diagnostics.restart_logliks },
              { "iterations", f.diagnostics.iterations },
              { "converged", f.diagnostics.converged },
              { "pruned_components", f.diagnostics.pruned_components },
              { "atom_detected", f.diagnostics.atom_detected },
              { "final_loglik", f.diagnostics.final_loglik },
          } },
    };
    return j.dump(2) + "\n";
}

QuasiGaussianParams params_from_json(const std::string& text)
{
    return params_from(parse(text));
}

MixtureModel mixture_from_json(const std::string& text)
{
    return mixture_from(parse(text));
}

MixtureModel model_from_json(const std::string& text)
{
    const json j = parse(text);
    if (j.contains("components"))
        return mixture_from(j);
    MixtureModel m;
    MixtureComponent comp;
    comp.weight = 1.0;
    if (j.contains("coords"))
        comp.model = product_from(j);
    else
        comp.model = make_product({ params_from(j) });
    m.components.push_back(std::move(comp));
    return m;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot open file for writing: " + path);
    out << text;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace qg
