#include "anonplan/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "anonplan/error.hpp"

namespace anonplan {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw Error("malformed number '" + text + "'");
  return v;
}

}  // namespace anonplan
