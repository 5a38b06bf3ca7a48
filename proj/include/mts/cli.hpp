#pragma once

// Command-line front end: `expand`, `integrate`, `stability`, `converge`,
// `shadow`. Output goes to `out` (or the --out file), diagnostics to `err`.

#include <ostream>
#include <string>
#include <vector>

namespace mts {

// args excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mts
