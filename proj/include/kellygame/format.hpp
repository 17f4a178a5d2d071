#pragma once

#include <cstdio>
#include <string>

namespace kelly {

/// %.17g: round-trips every double.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace kelly
