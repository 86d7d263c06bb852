#ifndef EMSCA_TOOLS_CLI_HPP
#define EMSCA_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace emsca::cli {

// Exit-status contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitUnconfident = 3;

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emsca::cli

#endif  // EMSCA_TOOLS_CLI_HPP
