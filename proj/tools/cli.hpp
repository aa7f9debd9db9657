#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// args excludes the program name. Output that is not redirected with --out
// goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace selint::cli
