#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace displace {

/// Exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,         // bad arguments, unreadable or invalid spec
    kExitFailed = 2,        // a check failed or a verification exceeded --tol
    kExitInconclusive = 3,  // check only: no failures, at least one inconclusive
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`; verbosity follows the DISPLACE_LOG environment variable.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace displace
