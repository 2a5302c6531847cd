#pragma once

namespace uncross {

// Entry point behind the `uncross` binary. Exit codes: 0 success, 1 runtime
// failure (bad input file, generation failure), 2 command line usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace uncross
