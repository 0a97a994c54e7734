#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fhtreg {

/// Command-line entry point, parameterized over streams so the whole
/// surface is testable in-process. `args` excludes the program name.
/// Returns the process exit status: 0 on success, nonzero with a
/// diagnostic on `err` otherwise. Output is deterministic for fixed
/// arguments and seed: no timestamps, no machine-dependent content.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fhtreg
