#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace magnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command line (args excludes the program name). Diagnostics go to
/// `err`, short status lines to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace magnet::cli
