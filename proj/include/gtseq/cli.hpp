#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gtseq {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitDomain = 3,
    kExitFlagged = 4,
};

/// Runs the gtseq command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace gtseq
