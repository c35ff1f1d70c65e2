#pragma once

#include <cmath>

namespace t2u {

// Speed of light in vacuum [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// dB <-> linear. Reflectivities arrive in dBm^2 and powers in dBm; every dB-ish
// config quantity goes through one of these exactly once, in the owning struct's
// accessor.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace t2u
