#pragma once

#include <iosfwd>

namespace horizon {

// Entry point of the `horizon` binary. Returns 0 on success, 2 for input
// errors (bad flags, missing or malformed files) and 3 for computation errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace horizon
