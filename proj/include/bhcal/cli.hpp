#pragma once

#include <iosfwd>
#include <string>
#include <vector>

/// Scenario runner behind the `bhcal` tool.
///
/// Subcommands: section, density, calibrate, prop-check, semi-elliptic,
/// lp-search, kdim-search. Every run prints a short summary to `out`; the
/// full JSON report goes to --output (written atomically) or to `out` with
/// --json. Reports contain no timings or paths, so identical scenarios give
/// byte-identical reports.
namespace bhcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

/// `args` excludes the program name. Returns kExitOk when every asserted
/// invariant held, kExitViolation when one failed (the report carries the
/// witness) and kExitInputError on malformed input or configuration.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bhcal::cli
