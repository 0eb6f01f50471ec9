#pragma once

#include <numbers>

// 87Rb D1 line data and SI constants. Frequencies quoted in MHz are linear
// (cycles per microsecond), matching how laboratory Rabi frequencies and
// detunings are reported.
namespace mdsr::constants {

inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kEpsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double kBohrMagneton = 1.399624;        // MHz/G
inline constexpr double kD1ReducedDipole = 2.537e-29;    // C m, <J=1/2||er||J'=1/2>
inline constexpr double kD1Wavelength = 795.0;           // nm
inline constexpr double kD1NaturalLinewidth = 5.75;      // MHz (Gamma / 2 pi)
inline constexpr double kSaturationIntensity = 1.496;    // mW/cm^2

inline constexpr double kElectronSpin = 0.5;
inline constexpr double kNuclearSpin = 1.5;
inline constexpr double kGroundJ = 0.5;   // 5S_1/2
inline constexpr double kExcitedJ = 0.5;  // 5P_1/2
inline constexpr double kGroundLandeGj = 2.0;
inline constexpr double kExcitedLandeGj = 2.0 / 3.0;

/// The one place where linear MHz becomes an angular SI rate (rad/s).
constexpr double mhz_to_angular_per_second(double mhz) {
  return 2.0 * std::numbers::pi * 1e6 * mhz;
}

/// Linear MHz to an angular rate per millisecond (rad/ms).
constexpr double mhz_to_angular_per_ms(double mhz) {
  return 2.0 * std::numbers::pi * 1e3 * mhz;
}

}  // namespace mdsr::constants
