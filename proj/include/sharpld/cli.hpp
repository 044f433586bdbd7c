#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sharpld::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one subcommand. args excludes the program name. When an output file is
/// given the CSV goes there and the summary line to out; otherwise the CSV goes
/// to out and the summary to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sharpld::cli
