#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergobound::cli {

enum ExitCode : int {
    kOk = 0,
    kBadFlags = 2,
    kBelowThreshold = 3,
    kNotDominated = 4,
    kSimulationFailed = 5,
};

/// Runs one command line (without the program name). Payloads go to `out`
/// or to the --out file; diagnostics go to `err` only on failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ergobound::cli
