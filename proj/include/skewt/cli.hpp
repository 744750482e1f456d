#pragma once

namespace skewt {

// Command-line entry point; returns the process exit status.
// Exit codes: 0 success, 1 parse/IO error, 2 domain error,
// 3 non-convergence (report still written).
int run_cli(int argc, const char* const* argv);

}  // namespace skewt
