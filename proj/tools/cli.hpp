#pragma once

// The crdist command line as a callable entry point, so tests can drive it
// in-process. Exit codes: 0 success, 1 check failure, 2 input error,
// 3 envelope exceeded.

#include <ostream>

namespace crdist::cli {

enum Exit : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kEnvelope = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crdist::cli
