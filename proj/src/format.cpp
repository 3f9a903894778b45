#include "musclework/format.hpp"

#include <cstdio>
#include <cstdlib>

namespace musclework {

std::string fmt9(double v) {
  if (v == 0.0) return "0"; // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) {
  if (v == 0.0) return 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

} // namespace musclework
