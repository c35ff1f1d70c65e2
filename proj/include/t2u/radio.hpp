#pragma once

#include <cmath>
#include <string>

#include "t2u/constants.hpp"
#include "t2u/errors.hpp"

namespace t2u {

// Downlink radio bookkeeping shared by every experiment. Powers are stored in
// the units they arrive in (dBm) and converted through the accessors, so there
// is a single conversion site per quantity.
struct RadioParams {
    double carrier_frequency_hz = 70e9;
    double bandwidth_hz = 61e6;
    double tx_power_dbm = 20.0;      // total BS transmit power sigma_s^2
    double noise_power_dbm = -82.0;  // receiver noise power sigma_z^2
    double cell_radius_m = 100.0;
    double pulse_time_s = 10e-6;          // single-pulse duration T
    int repetition_factor = 4;            // coherent repetitions per code bit, P
    double time_bandwidth_product = 512;  // matched-filter gain TB (<= T*B)
    double false_alarm_target = 0.05;     // per-cell false alarm probability

    double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
    double tx_power_w() const { return dbm_to_watt(tx_power_dbm); }
    double noise_power_w() const { return dbm_to_watt(noise_power_dbm); }

    // Width of one range-resolution bin, c/(2B). Targets farther than half a
    // bin from a beam's gate range do not enter that beam's decision variable.
    double range_bin_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }

    // Coherent processing interval of one code bit, P*T.
    double bit_time_s() const { return repetition_factor * pulse_time_s; }

    void validate() const {
        if (!(carrier_frequency_hz > 0.0)) throw ConfigError("carrier_frequency_hz must be > 0");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be > 0");
        if (!(cell_radius_m > 0.0)) throw ConfigError("cell_radius_m must be > 0");
        if (!(pulse_time_s > 0.0)) throw ConfigError("pulse_time_s must be > 0");
        if (repetition_factor < 1) throw ConfigError("repetition_factor must be >= 1");
        if (!(time_bandwidth_product >= 1.0))
            throw ConfigError("time_bandwidth_product must be >= 1");
        if (time_bandwidth_product > pulse_time_s * bandwidth_hz * (1.0 + 1e-12))
            throw ConfigError("time_bandwidth_product exceeds pulse_time_s * bandwidth_hz");
        if (!(false_alarm_target > 0.0) || !(false_alarm_target < 1.0))
            throw ConfigError("false_alarm_target must lie in (0, 1)");
    }
};

// Echo delay and Doppler shift at the given range and radial velocity. Delay
// follows the R/c convention of the baseband signal model.
inline double echo_delay_s(double range_m, const RadioParams&) {
    return range_m / kSpeedOfLight;
}

inline double echo_doppler_hz(double radial_velocity_mps, const RadioParams& radio) {
    return radio.carrier_frequency_hz / kSpeedOfLight * radial_velocity_mps;
}

} // namespace t2u
