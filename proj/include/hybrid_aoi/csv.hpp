#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace hybrid_aoi {

// Fewest significant digits (at most 17) that read back as the same double.
inline std::string format_number(double v) {
  char buffer[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, v);
    if (precision == 17 || std::strtod(buffer, nullptr) == v) break;
  }
  return buffer;
}

inline std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace hybrid_aoi
