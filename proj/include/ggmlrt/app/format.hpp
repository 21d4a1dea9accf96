#pragma once

#include <charconv>
#include <string>

namespace ggmlrt::app {

// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace ggmlrt::app
