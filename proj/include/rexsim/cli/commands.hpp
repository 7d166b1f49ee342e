#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rexsim/cli/report.hpp"
#include "rexsim/config.hpp"

namespace rexsim::cli {

/// Process exit codes; part of the stable interface.
enum ExitCode : int
{
    exit_ok = 0,
    exit_golden_mismatch = 1,
    exit_usage = 2,
    exit_validation = 3,
    exit_numeric = 4,
    exit_io = 5,
};

/// `args` excludes the program name. Report on `out`, diagnostics on `err`.
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

/*!
 * Every reference-device quantity the tool reproduces, with its reference value and
 * acceptance band. Runs the Monte Carlo items, so it takes a few seconds.
 */
RunReport golden_report(config::ConfigDocument const& cfg, std::uint64_t seed, unsigned workers);

} // namespace rexsim::cli
