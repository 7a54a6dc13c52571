#pragma once

#include <cmath>

namespace dvca {

// Half-up rounding at a fixed number of decimals. The slack absorbs binary
// representation error so that e.g. 0.045 (stored as 0.04499999...) rounds to
// 0.05 like its decimal spelling.
inline double round_half_up(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double scaled = value * scale;
  return std::floor(scaled + 0.5 + 1e-9 * std::fmax(1.0, std::fabs(scaled))) / scale;
}

// Same rounding, returning the integer count of 10^-digits units.
inline long long round_half_up_units(double value, int digits) {
  const double scaled = value * std::pow(10.0, digits);
  return static_cast<long long>(std::floor(scaled + 0.5 + 1e-9 * std::fmax(1.0, std::fabs(scaled))));
}

}  // namespace dvca
