#pragma once

#include <iosfwd>

namespace freeprob::cli {

// Exit codes: 0 pass (or success), 1 a check failed, 2 usage, parse or
// engine error. Reports go to `out` unless --out is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freeprob::cli
