#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace decklander {

/// Shortest representation that round-trips a double exactly.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Compact representation for human-scale logs (still deterministic).
inline std::string csv_num9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace decklander
