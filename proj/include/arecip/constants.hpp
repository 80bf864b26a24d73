#pragma once

#include <numbers>

namespace arecip {

inline constexpr double kCAlwaysAbove = 3.0;
inline constexpr double kCAlwaysBelow = 2.0 * std::numbers::sqrt2;
inline constexpr double kCZeroMean = 26.0 / 9.0;

}  // namespace arecip
