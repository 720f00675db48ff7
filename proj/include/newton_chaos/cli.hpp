#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "newton_chaos/functions.hpp"

namespace newton_chaos {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitParse = 2,
    kExitHypotheses = 3,
    kExitCertification = 4,
};

inline constexpr int kJsonSchemaVersion = 1;

/// Malformed function spec; column is 1-based into the spec string.
class SpecParseError : public std::invalid_argument {
public:
    SpecParseError(std::size_t column, const std::string& what)
        : std::invalid_argument("column " + std::to_string(column) + ": " + what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// "poly:c0,c1,...,cn" with ascending decimal coefficients.
SmoothFunction parse_function_spec(const std::string& spec, Interval window = default_window());

/// Shortest spec string that parses back to the same coefficients.
std::string canonical_spec(const SmoothFunction& F);

/// "lo:hi".
Interval parse_window(const std::string& s);

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`; the return value is an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newton_chaos
