#pragma once

#include <iosfwd>

namespace ckl::cli {

/// Entry point of the `ckl` tool. Returns the process exit code: 0 on
/// success, 2 for usage errors (unknown verb, method or flag), 1 when a run
/// fails.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ckl::cli
