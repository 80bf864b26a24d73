#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arecip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `arecip` tool and the tests. args excludes argv[0].
/// Results go to `out` (or to --out when given); diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arecip::cli
