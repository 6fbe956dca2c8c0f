#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace valuepilot::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitRemote = 3,
};

/// Runs the tool with `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace valuepilot::cli
