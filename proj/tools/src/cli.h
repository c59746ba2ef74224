#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lambda_infer::cli {

enum Exit_code { ok = 0, usage = 1, data = 2, numerical = 3 };

// args excludes the program name.  Primary output goes to `out` unless --out
// names a file; diagnostics go to `err`.
auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace lambda_infer::cli
