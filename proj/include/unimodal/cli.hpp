#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "unimodal/error.hpp"

namespace unimodal::cli {

/// 0 success, 2 usage/validation/input, 3 missing data, 4 table or curve,
/// 5 degenerate spread.
int exit_code(ErrorKind kind) noexcept;

/// Runs one command line (without the program name). Reports go to `out`,
/// single-line "error[<kind>]: <message>" diagnostics and seed dumps to
/// `err`. An input of "-" reads from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace unimodal::cli
