#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "lambda_infer/genealogy.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"

namespace lambda_infer {

// Dataset text: one `<time> <count> <haplotype>` record per line, records grouped
// by nondecreasing time; blank lines and lines starting with '#' are skipped.
// Errors carry the 1-based line number.
auto parse_dataset(std::istream& in) -> Time_series_data;
auto read_dataset(const std::string& path) -> Time_series_data;
auto write_dataset(std::ostream& out, const Time_series_data& data) -> void;

// Flat `key = value` text; '#' starts a comment.
using Key_values = std::map<std::string, std::string>;
auto parse_key_values(std::istream& in) -> Key_values;
auto read_key_values(const std::string& path) -> Key_values;

// Measure from config keys kingman_mass, atoms = [(loc, w), ...],
// kernels = [(loc, sigma, w), ...], betas = [(a, b, w), ...], eta.
auto measure_from_key_values(const Key_values& kv) -> Lambda_measure;

// Either a named family or a path to a measure config file.  Names:
// kingman, star, uniform, dirac:x, beta:a,b, beta-coalescent:alpha,
// eldon-wakeley:psi, durrett-schweinsberg:c.
auto parse_measure_spec(const std::string& spec) -> Lambda_measure;

// Single-column CSV with header lambda_k; the first row is lambda_3.
auto write_moments_csv(std::ostream& out, const Moment_sequence& seq) -> void;
auto parse_moments_csv(std::istream& in) -> Moment_sequence;

// Parses "(a, b), (c, d)" style tuple lists, optionally wrapped in [ ].
auto parse_tuples(const std::string& text, std::size_t arity) -> std::vector<std::vector<double>>;

}  // namespace lambda_infer
