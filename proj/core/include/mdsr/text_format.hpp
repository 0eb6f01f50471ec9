#pragma once

#include <string>

namespace mdsr {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// `value` with 17 significant digits (printf %.17g style).
std::string format_double17(double value);

/// `value` rounded to `decimals` places, fixed notation.
std::string format_fixed(double value, int decimals);

}  // namespace mdsr
