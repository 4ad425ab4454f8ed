#pragma once

#include <string>
#include <vector>

#include "qg/characterize.hpp"
#include "qg/matrix.hpp"
#include "qg/mixture.hpp"
#include "qg/multivar.hpp"
#include "qg/qgauss.hpp"

namespace qg {

//! Shortest decimal form that round-trips the double exactly
//! (printf "%.17g").
std::string format_double(double v);

//! CSV with a header row "x1,...,xd", '.' decimal point, ',' separator and
//! LF line endings; values are written with format_double so a write/read
//! round trip is bit-exact.
void write_csv(const std::string& path, const Matrix& m,
               const std::vector<std::string>& column_names = {});
std::string csv_to_string(const Matrix& m,
                          const std::vector<std::string>& column_names = {});

//! Reads a CSV written by write_csv (or any comma-separated file with one
//! header row). Ragged rows or unparsable fields raise
//! std::invalid_argument.
Matrix read_csv(const std::string& path);
Matrix csv_from_string(const std::string& text);

// JSON serialization. Objects are emitted with sorted keys and
// round-trip-exact numbers, so equal inputs produce identical bytes.
std::string to_json(const QuasiGaussianParams& p);
std::string to_json(const ProductQuasiGaussian& m);
std::string to_json(const MixtureModel& m);
std::string to_json(const IndependenceReport& r);
std::string to_json(const CharacterizationSummary& s);
std::string to_json(const RegularityEstimate& e);
std::string to_json(const FitResult& f); //!< model plus diagnostics

//! Parses {a, alpha_neg, alpha_pos, sigma, c_neg, c_pos}; the normalization
//! constraint is re-validated to 1e-9 relative and violations are rejected
//! with std::invalid_argument.
QuasiGaussianParams params_from_json(const std::string& text);

MixtureModel mixture_from_json(const std::string& text);

//! Accepts any of the three model shapes: bare parameter object, product
//! {coords: [...]}, or full mixture {components: [...], atom: ...}. The
//! first two load as a single-component mixture of weight 1.
MixtureModel model_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace qg
