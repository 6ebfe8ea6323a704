#pragma once

// Physical constants, SI units throughout. CODATA 2018 values.
namespace lclock {

inline constexpr double kSpeedOfLight = 299792458.0;          // m / s
inline constexpr double kHbar = 1.054571817e-34;              // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kSr87Mass = 86.9088774970 * kAtomicMassUnit;  // kg

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace lclock
