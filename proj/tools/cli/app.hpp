#pragma once

#include <ostream>

namespace polysart::cli {

/// Parses arguments and runs one subcommand. Returns the process exit status:
/// 0 on success, 1 on any error (diagnostic on `err`), 2 when verify-lemmas
/// finds a failing check.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polysart::cli
