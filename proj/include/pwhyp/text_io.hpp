#pragma once

#include <cstdio>
#include <string>

namespace pwhyp {

/// Round-trip decimal form of a double (17 significant digits).
inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers never observe a partial file. Throws std::runtime_error.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pwhyp
