#pragma once

#include <iosfwd>

namespace lawvar {

/// Command-line entry point, exposed for in-process testing.
/// Exit codes: 0 success / all checks pass, 1 some Fail or Inconsistent
/// verdict, 2 usage or parse error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lawvar
