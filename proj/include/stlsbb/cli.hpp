#pragma once

#include <iosfwd>

namespace stlsbb {

/// Command-line entry point. Exit status: 0 success, 1 usage error,
/// 2 experiment-level failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stlsbb
