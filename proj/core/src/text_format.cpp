#include "mdsr/text_format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace mdsr {
namespace {

template <typename... Args>
std::string to_chars_string(double value, Args... args) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, args...);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf.data(), ptr};
}

}  // namespace

std::string format_double(double value) { return to_chars_string(value); }

std::string format_double17(double value) { return to_chars_string(value, std::chars_format::general, 17); }

std::string format_fixed(double value, int decimals) {
  return to_chars_string(value, std::chars_format::fixed, decimals);
}

}  // namespace mdsr
