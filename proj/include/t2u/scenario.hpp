#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/hadamard.hpp"
#include "t2u/radio.hpp"
#include "t2u/ris.hpp"
#include "t2u/rng.hpp"

namespace t2u {

enum class TargetKind { Vue, Clutter };

// How the RIS aperture of a VUE sees the BS: azimuth theta over the aperture
// plane and incidence psi off boresight.
struct RisIncidence {
    double theta_rad = 0.0;
    double psi_rad = 0.0;
};

// One scatterer in the cell, either a RIS-equipped vehicle or passive clutter.
// Positions are polar around the BS; motion is radial.
struct Target {
    TargetKind kind = TargetKind::Clutter;
    double range_m = 0.0;
    double azimuth_rad = 0.0;
    double radial_velocity_mps = 0.0;
    double reflectivity_m2 = 0.0;  // aggregate RCS (RIS aperture or clutter patch)
    RisIncidence ris_incidence{};  // meaningful for VUEs only
    int code_row = -1;             // codebook row for VUEs, -1 for clutter
};

// Homogeneous Poisson clutter field: expected density over the disk plus a
// log-normal reflectivity spread (std 0 collapses to a deterministic RCS).
struct ClutterModel {
    double density_per_m2 = 0.0;
    double mean_reflectivity_dbm2 = 8.0;
    double reflectivity_std_db = 0.0;

    double mean_reflectivity_m2() const { return db_to_linear(mean_reflectivity_dbm2); }

    void validate() const {
        if (density_per_m2 < 0.0) throw ConfigError("clutter density_per_m2 must be >= 0");
        if (reflectivity_std_db < 0.0) throw ConfigError("reflectivity_std_db must be >= 0");
    }
};

struct PolarPosition {
    double range_m = 0.0;
    double azimuth_rad = 0.0;
};

// Inputs to scenario construction. Everything stochastic about a drop (VUE
// placement, clutter count/placement/reflectivity) is drawn from the seed
// passed to build_scenario; fixed VUE placements bypass those draws.
struct ScenarioConfig {
    RadioParams radio{};
    int num_vues = 16;
    int bs_elements = 64;
    int ris_elements = 94 * 94;
    ClutterModel clutter{};
    std::optional<std::vector<PolarPosition>> fixed_vue_positions;
    std::optional<int> code_length;      // default: smallest power of two >= num_vues + 1
    double incidence_psi_max_rad = kPi / 3.0;  // VUE aperture tilt drawn from [0, max]
    double max_speed_mps = 30.0;
    double min_range_m = 1.0;

    void validate() const {
        radio.validate();
        clutter.validate();
        if (num_vues < 1) throw ConfigError("num_vues must be >= 1");
        if (bs_elements < 1) throw ConfigError("bs_elements must be >= 1");
        integer_sqrt_exact(ris_elements, "ris_elements");
        if (incidence_psi_max_rad < 0.0 || incidence_psi_max_rad > kPi / 2.0)
            throw ConfigError("incidence_psi_max_rad must lie in [0, pi/2]");
        if (max_speed_mps < 0.0) throw ConfigError("max_speed_mps must be >= 0");
        if (!(min_range_m > 0.0)) throw ConfigError("min_range_m must be > 0");
        if (min_range_m >= radio.cell_radius_m)
            throw ConfigError("min_range_m must be below cell_radius_m");
        if (fixed_vue_positions &&
            fixed_vue_positions->size() != static_cast<std::size_t>(num_vues))
            throw ConfigError("fixed_vue_positions count must equal num_vues");
        if (code_length) {
            const int c = *code_length;
            if (c < 2 || (c & (c - 1)) != 0)
                throw ConfigError("code_length must be a power of two >= 2");
            if (num_vues + 1 > c)
                throw ConfigError("code_length too short: need num_vues + 1 rows");
        }
    }
};

// One realized drop: radio constants, VUEs with their RIS geometry and code
// rows, and a Poisson clutter field.
struct Scenario {
    RadioParams radio{};
    int bs_elements = 0;
    int ris_elements = 0;
    int code_length = 0;
    std::vector<Target> vues;
    std::vector<Target> clutter;
    std::uint64_t seed = 0;

    std::size_t target_count() const { return vues.size() + clutter.size(); }

    // Targets in scan order, VUEs first. Index k < vues.size() is VUE k.
    const Target& target(std::size_t i) const {
        return i < vues.size() ? vues[i] : clutter[i - vues.size()];
    }
};

namespace detail {

// Radius with uniform density over the disk, redrawn until above the floor.
inline double disk_radius(Rng& rng, double cell_radius_m, double min_range_m) {
    for (;;) {
        const double r = cell_radius_m * std::sqrt(rng.uniform());
        if (r >= min_range_m) return r;
    }
}

} // namespace detail

inline Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int code_len = cfg.code_length ? *cfg.code_length : code_length_for(cfg.num_vues);
    if (cfg.num_vues + 1 > code_len)
        throw ConfigError("code_length too short: need num_vues + 1 rows");

    Scenario scn;
    scn.radio = cfg.radio;
    scn.bs_elements = cfg.bs_elements;
    scn.ris_elements = cfg.ris_elements;
    scn.code_length = code_len;
    scn.seed = seed;

    Rng rng(seed);
    const double ris_rcs =
        ris_radar_cross_section_m2(cfg.ris_elements, cfg.radio.carrier_frequency_hz);

    scn.vues.reserve(static_cast<std::size_t>(cfg.num_vues));
    for (int k = 0; k < cfg.num_vues; ++k) {
        Target t;
        t.kind = TargetKind::Vue;
        if (cfg.fixed_vue_positions) {
            t.range_m = (*cfg.fixed_vue_positions)[static_cast<std::size_t>(k)].range_m;
            t.azimuth_rad = (*cfg.fixed_vue_positions)[static_cast<std::size_t>(k)].azimuth_rad;
            if (t.range_m < cfg.min_range_m || t.range_m > cfg.radio.cell_radius_m)
                throw ConfigError("fixed VUE position outside [min_range_m, cell_radius_m]");
        } else {
            t.range_m = detail::disk_radius(rng, cfg.radio.cell_radius_m, cfg.min_range_m);
            t.azimuth_rad = rng.uniform(-kPi, kPi);
        }
        t.ris_incidence.theta_rad = rng.uniform(-kPi, kPi);
        t.ris_incidence.psi_rad = rng.uniform(0.0, cfg.incidence_psi_max_rad);
        t.radial_velocity_mps = rng.uniform(-cfg.max_speed_mps, cfg.max_speed_mps);
        t.reflectivity_m2 = ris_rcs;
        t.code_row = k + 1;
        scn.vues.push_back(t);
    }

    if (cfg.clutter.density_per_m2 > 0.0) {
        const double area = kPi * cfg.radio.cell_radius_m * cfg.radio.cell_radius_m;
        const auto count = rng.poisson(cfg.clutter.density_per_m2 * area);
        scn.clutter.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            Target t;
            t.kind = TargetKind::Clutter;
            t.range_m = detail::disk_radius(rng, cfg.radio.cell_radius_m, cfg.min_range_m);
            t.azimuth_rad = rng.uniform(-kPi, kPi);
            t.radial_velocity_mps = 0.0;
            const double refl_dbm2 = cfg.clutter.reflectivity_std_db > 0.0
                                         ? rng.normal(cfg.clutter.mean_reflectivity_dbm2,
                                                      cfg.clutter.reflectivity_std_db)
                                         : cfg.clutter.mean_reflectivity_dbm2;
            t.reflectivity_m2 = db_to_linear(refl_dbm2);
            scn.clutter.push_back(t);
        }
    }
    return scn;
}

// Delay and Doppler of a target's echo under the scenario radio parameters.
inline std::pair<double, double> delay_doppler(const Target& t, const RadioParams& radio) {
    return {echo_delay_s(t.range_m, radio), echo_doppler_hz(t.radial_velocity_mps, radio)};
}

} // namespace t2u
