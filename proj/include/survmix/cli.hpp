#pragma once

namespace survmix {

// Entry point for the survmix command-line tool; returns the process exit
// code (0 success, 1 usage error, 2 bad input data, 3 numerical failure).
int cli_main(int argc, char** argv);

}  // namespace survmix
