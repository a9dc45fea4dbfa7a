#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Parses a distribution given either as a JSON array of numbers or as
/// whitespace/comma separated decimals; the first non-space byte decides
/// ('[' means JSON). Throws mec::Error(ParseError).
std::vector<double> parse_distribution(std::string_view text);

/// Runs one command line (args excludes the program name). Results go to
/// out, diagnostics to err; returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

} // namespace mec::cli
