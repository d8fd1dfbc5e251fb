#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace inhomstat {

/// Shortest decimal text that parses back to exactly `v`; NaN prints as NA.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace inhomstat
