// fmm: command-line surface.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fmm {

/// Dispatches one CLI invocation (argv without the program name).
/// Exit code: 0 valid/pass, 1 invalid/fail, 2 usage, parse or file errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmm
