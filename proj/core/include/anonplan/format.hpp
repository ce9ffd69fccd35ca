#pragma once

#include <string>

namespace anonplan {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Parses a double written by format_double (or any strtod-compatible text); throws Error.
double parse_double(const std::string& text);

}  // namespace anonplan
