#pragma once

namespace rotkick {

// Speed of light in cm/ps.  Rotational energies are kept in wavenumbers
// (cm^-1) and times in picoseconds, so a level E acquires phase
// 2*pi*c*E*t during free evolution.
inline constexpr double kSpeedOfLightCmPerPs = 0.0299792458;

// Boltzmann constant over h*c, in cm^-1 per kelvin.
inline constexpr double kBoltzmannCmPerK = 0.6950348;

inline constexpr const char* kVersion = "1.0.0";

}  // namespace rotkick
