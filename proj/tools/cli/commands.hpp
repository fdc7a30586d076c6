#ifndef DAAS_CLI_COMMANDS_HPP
#define DAAS_CLI_COMMANDS_HPP

#include <iosfwd>

namespace daas::cli {

/// Exit codes. Usage and input errors share 2 so scripts can tell them from domain failures.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Runs one `daas` invocation; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace daas::cli

#endif
