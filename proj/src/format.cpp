#include "grapeclose/format.hpp"

#include <array>
#include <charconv>

namespace grapeclose {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double v, int digits) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, digits);
  std::string s(buf.data(), ptr);
  if (!s.empty() && s[0] == '-' &&
      s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

}  // namespace grapeclose
