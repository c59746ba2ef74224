#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lambda_infer/mcmc.h"
#include "lambda_infer/prior.h"

namespace lambda_infer::cli {

// Header: step, parameter names, lambda3..lambdaN, log_estimate, accepted,
// stage1_accepted, wall_ms.  Comment lines (leading '#') precede the header.
auto write_chain_csv(std::ostream& out, const Prior_spec& spec, const Chain_output& chain,
                     const std::vector<std::string>& comments, bool timing = true) -> void;

// Columns of a chain CSV by header name.  Skips comment lines; throws Data_error
// on ragged rows or unparsable cells, with the line number.
auto read_csv_columns(std::istream& in) -> std::map<std::string, std::vector<double>>;
auto read_csv_columns(const std::string& path) -> std::map<std::string, std::vector<double>>;

}  // namespace lambda_infer::cli
