#pragma once

#include <charconv>
#include <string>

namespace gffi {

/// Shortest round-trip decimal form; identical bytes on every run.
inline std::string fmt_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace gffi
