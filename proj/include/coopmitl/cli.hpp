#pragma once

#include <iosfwd>

namespace coopmitl {

/// Command-line entry point. Exit codes: 0 success, 1 violation / no
/// accepting run / formula outside the planner fragment, 2 usage, syntax or
/// configuration error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coopmitl
