#include "csmmab/format.hpp"

#include <array>
#include <charconv>

namespace csmmab {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

}  // namespace csmmab
