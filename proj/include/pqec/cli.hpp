#pragma once

namespace pqec {

// Entry point of the command-line driver. Exit codes: 0 pass, 2 semantic
// failure (verification failed, precondition unmet), 1 usage or I/O error.
int run_cli(int argc, const char* const* argv);

}  // namespace pqec
