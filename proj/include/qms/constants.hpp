#pragma once

#include <numbers>

namespace qms::constants {

inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J / K
inline constexpr double kEpsilon0 = 8.8541878128e-12;    // F / m
inline constexpr double kSpeedOfLight = 299792458.0;     // m / s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace qms::constants
