#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "t2u/arrays.hpp"
#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/rng.hpp"

namespace t2u {

// Per-bit RIS state. BackReflect retrodirects the incident beam to its source;
// the other three are "off bit" behaviours: Specular keeps all phases at zero,
// RandomScatter draws i.i.d. phases, Off models an absorbing surface.
enum class RisMode { BackReflect, Specular, RandomScatter, Off };

inline const char* to_string(RisMode m) {
    switch (m) {
        case RisMode::BackReflect: return "back_reflect";
        case RisMode::Specular: return "specular";
        case RisMode::RandomScatter: return "random_scatter";
        case RisMode::Off: return "off";
    }
    return "?";
}

// Unit-modulus diagonal phase profile of an m-element square RIS. The Frobenius
// norm of the implied diagonal matrix is sqrt(m) by construction.
//
// Profiles whose phase is linear across the aperture (back-reflect, specular)
// additionally record the direction cosines they were built for; the cascade
// sum then has a closed form and, at the design incidence, equals the element
// count without accumulating m rounding errors.
struct RisProfile {
    int element_count = 0;
    RisMode mode = RisMode::Specular;
    std::vector<double> phases_rad;  // per-element reflection phase gamma_m

    bool linear_phase = false;  // gamma_{u,v} = -pi*(u*dir_cos_u + v*dir_cos_v)
    double dir_cos_u = 0.0;
    double dir_cos_v = 0.0;

    // Power fraction reflected towards the interrogating beam while in an off
    // bit. Zero means a perfectly quiet off state.
    double leakage_power_ratio = 0.0;

    void validate() const {
        if (element_count < 1) throw ConfigError("RIS element count must be >= 1");
        if (phases_rad.size() != static_cast<std::size_t>(element_count))
            throw StructureError("RIS profile phase vector length mismatch");
        if (leakage_power_ratio < 0.0 || leakage_power_ratio > 1.0)
            throw ConfigError("leakage_power_ratio must lie in [0, 1]");
    }
};

// Monostatic cascade factor of the profile for a wave arriving from (theta,
// psi): sum_m a_m^2 * exp(j*gamma_m) with a_m the unit-modulus planar steering
// entries; the square reflects traversing the aperture once in and once out
// along the same direction. Linear-phase profiles separate into a product of
// two geometric sums over the aperture axes.
inline std::complex<double> backscatter_sum(const RisProfile& profile, double theta_rad,
                                            double psi_rad) {
    profile.validate();
    const int side = integer_sqrt_exact(profile.element_count, "RIS element count");
    const double cu = std::cos(theta_rad) * std::sin(psi_rad);
    const double cv = std::sin(theta_rad) * std::sin(psi_rad);
    if (profile.linear_phase) {
        return dirichlet_sum(side, cu - profile.dir_cos_u) *
               dirichlet_sum(side, cv - profile.dir_cos_v);
    }
    std::complex<double> acc{0.0, 0.0};
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) {
            const double steer2 = kPi * (cu * u + cv * v);  // doubled steering phase
            const std::size_t i = static_cast<std::size_t>(v) * side + u;
            acc += std::polar(1.0, steer2 + profile.phases_rad[i]);
        }
    return acc;
}

namespace detail {

inline void fill_linear_phases(RisProfile& p, int side) {
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u)
            p.phases_rad[static_cast<std::size_t>(v) * side + u] =
                -kPi * (p.dir_cos_u * u + p.dir_cos_v * v);
}

} // namespace detail

// Profile that back-reflects a wave incident from (theta, psi): gamma_m =
// -2 * angle(a_m), so every term of the cascade sum lines up at phase zero and
// the sum equals the element count.
inline RisProfile back_reflection_profile(int m, double theta_rad, double psi_rad) {
    const int side = integer_sqrt_exact(m, "RIS element count");
    RisProfile p;
    p.element_count = m;
    p.mode = RisMode::BackReflect;
    p.linear_phase = true;
    p.dir_cos_u = std::cos(theta_rad) * std::sin(psi_rad);
    p.dir_cos_v = std::sin(theta_rad) * std::sin(psi_rad);
    p.phases_rad.resize(static_cast<std::size_t>(m));
    detail::fill_linear_phases(p, side);
    return p;
}

// Off-bit profile. Specular keeps the surface flat (all phases zero); random
// scatter draws phases uniform on [0, 2*pi) from the supplied stream; Off
// reflects nothing regardless of leakage.
inline RisProfile idle_profile(int m, RisMode variant, double leakage_power_ratio, Rng& rng) {
    if (variant == RisMode::BackReflect)
        throw StructureError("idle profile cannot use back_reflect mode");
    integer_sqrt_exact(m, "RIS element count");
    RisProfile p;
    p.element_count = m;
    p.mode = variant;
    p.leakage_power_ratio = leakage_power_ratio;
    p.phases_rad.assign(static_cast<std::size_t>(m), 0.0);
    if (variant == RisMode::RandomScatter) {
        for (auto& ph : p.phases_rad) ph = rng.uniform(0.0, 2.0 * kPi);
    } else {
        p.linear_phase = true;  // flat surface, zero slope
    }
    return p;
}

// Aggregate radar cross-section of an m-element quarter-wavelength square RIS:
//   4*pi*f0^2*A^2/c^2 with aperture A = m*(lambda/4)^2,
// which reduces to pi*c^2*m^2 / (64*f0^2).
inline double ris_radar_cross_section_m2(int m, double carrier_frequency_hz) {
    if (m < 1) throw ConfigError("RIS element count must be >= 1");
    if (!(carrier_frequency_hz > 0.0)) throw ConfigError("carrier frequency must be > 0");
    const double ratio = kSpeedOfLight / carrier_frequency_hz;
    return kPi * ratio * ratio * static_cast<double>(m) * static_cast<double>(m) / 64.0;
}

// Physical side length of the square surface, sqrt(m) * lambda/4.
inline double ris_side_length_m(int m, double carrier_frequency_hz) {
    const int side = integer_sqrt_exact(m, "RIS element count");
    return side * kSpeedOfLight / carrier_frequency_hz / 4.0;
}

} // namespace t2u
