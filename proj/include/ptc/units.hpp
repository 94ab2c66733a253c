// units.hpp: frequency conventions used throughout the library.
//
// Configuration files and reports quote ordinary frequencies nu = omega/2pi
// in kHz; all internal arithmetic runs on angular rates in rad/ms.  Time is
// in ms.  With those choices the two scales differ by exactly 2*pi:
//
//   omega [rad/ms] = 2*pi * nu [kHz]

#pragma once

#include <numbers>

namespace ptc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double angular_from_khz(double nu_khz) { return kTwoPi * nu_khz; }
inline constexpr double khz_from_angular(double omega) { return omega / kTwoPi; }

} // namespace ptc
