#pragma once

#include <string>

namespace grapeclose {

/// Shortest decimal that round-trips, locale independent.
std::string format_double(double v);

/// Fixed-precision decimal, locale independent, "-0" normalized to "0".
std::string format_fixed(double v, int digits);

}  // namespace grapeclose
