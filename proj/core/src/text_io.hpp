#pragma once

// Internal parsing/formatting helpers shared by the CSV and model-file code.
// Not installed.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwips::detail {

// Full round-trip precision: 17 significant digits survive text -> double.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string strip(const std::string& text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t' || text[b] == '\r')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
  return text.substr(b, e - b);
}

inline double parse_double(const std::string& cell, const std::string& context) {
  const std::string text = strip(cell);
  if (text.empty()) {
    throw std::invalid_argument(context + ": empty numeric cell");
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw std::invalid_argument(context + ": non-numeric cell '" + cell + "'");
  }
  return value;
}

inline long long parse_int(const std::string& cell, const std::string& context) {
  const std::string text = strip(cell);
  if (text.empty()) {
    throw std::invalid_argument(context + ": empty integer cell");
  }
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size()) {
    throw std::invalid_argument(context + ": non-integer cell '" + cell + "'");
  }
  return value;
}

}  // namespace fwips::detail
