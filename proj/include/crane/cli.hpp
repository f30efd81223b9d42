#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crane {

enum ExitCode { ExitOk = 0, ExitConfig = 1, ExitSimulation = 2, ExitIo = 3 };

// Entry point of the command-line tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crane
