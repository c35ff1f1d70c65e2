#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "t2u/arrays.hpp"
#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/radio.hpp"
#include "t2u/ris.hpp"
#include "t2u/rng.hpp"
#include "t2u/scenario.hpp"

namespace t2u {

// Free-space one-way power gain (lambda / (4*pi*R))^2.
inline double one_way_path_gain(double range_m, const RadioParams& radio) {
    if (!(range_m > 0.0)) throw ConfigError("range must be > 0");
    const double x = radio.wavelength_m() / (4.0 * kPi * range_m);
    return x * x;
}

// Two-way radar-equation power gain for a scatterer of RCS gamma_m2 at range_m:
//   gamma * lambda^2 / ((4*pi)^3 * R^4).
inline double radar_echo_gain(double reflectivity_m2, double range_m, const RadioParams& radio) {
    if (reflectivity_m2 < 0.0) throw ConfigError("reflectivity must be >= 0");
    if (!(range_m > 0.0)) throw ConfigError("range must be > 0");
    const double lam = radio.wavelength_m();
    const double fourpi = 4.0 * kPi;
    return reflectivity_m2 * lam * lam / (fourpi * fourpi * fourpi * range_m * range_m *
                                          range_m * range_m);
}

// Squared magnitude of the per-element in/out cascade amplitude
// |alpha_i * alpha_o|^2 of a VUE's surface. Calibrated so that a back-reflecting
// aperture (cascade sum = M) with the beam steered exactly at the VUE (two-way
// beam gain = N) yields end-to-end power radar_echo_gain(Gamma_k(M), R) * N^2,
// i.e. the aggregate RCS of the surface obeys the radar equation.
inline double vue_cascade_power(const Target& vue, int ris_elements, const RadioParams& radio) {
    const double rcs = ris_radar_cross_section_m2(ris_elements, radio.carrier_frequency_hz);
    const double m = static_cast<double>(ris_elements);
    return radar_echo_gain(rcs, vue.range_m, radio) / (m * m);
}

// Complex per-target echo amplitudes, drawn once per drop. VUE k keeps a
// deterministic magnitude with a uniform phase; clutter point l fades as
// CN(0, radar_echo_gain(Gamma_l, R_l)). Draw order is VUEs ascending, then
// clutter ascending, so replay from a seeded stream is stable.
inline std::vector<std::complex<double>> draw_vue_amplitudes(const Scenario& scn, Rng& rng) {
    std::vector<std::complex<double>> amp(scn.vues.size());
    for (std::size_t k = 0; k < scn.vues.size(); ++k) {
        const double a =
            std::sqrt(vue_cascade_power(scn.vues[k], scn.ris_elements, scn.radio));
        amp[k] = a * rng.phasor();
    }
    return amp;
}

inline std::vector<std::complex<double>> draw_clutter_fading(const Scenario& scn, Rng& rng) {
    std::vector<std::complex<double>> xi(scn.clutter.size());
    for (std::size_t l = 0; l < scn.clutter.size(); ++l) {
        const double p = radar_echo_gain(scn.clutter[l].reflectivity_m2,
                                         scn.clutter[l].range_m, scn.radio);
        xi[l] = rng.cgauss(0.5 * p);
    }
    return xi;
}

// Cascade factor of a scheduled profile seen from the VUE's own incidence.
// Off-bits with zero leakage contribute exactly nothing.
inline std::complex<double> cascade_factor(const RisProfile& profile, const RisIncidence& inc) {
    switch (profile.mode) {
        case RisMode::BackReflect:
            return backscatter_sum(profile, inc.theta_rad, inc.psi_rad);
        case RisMode::Off:
            return {0.0, 0.0};
        default:
            if (profile.leakage_power_ratio <= 0.0) return {0.0, 0.0};
            return std::sqrt(profile.leakage_power_ratio) *
                   backscatter_sum(profile, inc.theta_rad, inc.psi_rad);
    }
}

// Effective scalar gains between every beam column and every target, for one
// RIS profile assignment (one profile per VUE). Entry (q, j) is
//   alpha_j * cascade_j * |D_N(sin az_j - sin beam_q)|^2 / N,
// where cascade is 1 for clutter. The beamspace factor is real because the
// combiner reuses the precoder column.
struct ChannelGains {
    int stream_count = 0;
    std::size_t target_count = 0;
    std::size_t vue_count = 0;
    std::vector<std::complex<double>> gains;  // [stream * target_count + target]
    std::vector<RisMode> vue_mode;
    std::vector<double> gate_range_m;  // per stream, copied from the beamformers
    double per_stream_power_w = 0.0;

    std::complex<double> at(int stream, std::size_t target) const {
        return gains[static_cast<std::size_t>(stream) * target_count + target];
    }
};

inline ChannelGains composite_gains(const Scenario& scn,
                                    const std::vector<RisProfile>& vue_profiles,
                                    const Beamformers& beams, Rng& rng) {
    beams.validate();
    if (vue_profiles.size() != scn.vues.size())
        throw StructureError("need exactly one RIS profile per VUE");
    if (beams.stream_count() < static_cast<int>(scn.vues.size()))
        throw StructureError("fewer beam columns than VUEs");
    if (beams.bs_elements != scn.bs_elements)
        throw StructureError("beamformer BS element count disagrees with scenario");
    for (const auto& p : vue_profiles)
        if (p.element_count != scn.ris_elements)
            throw StructureError("RIS profile element count disagrees with scenario");

    const auto amp = draw_vue_amplitudes(scn, rng);
    const auto xi = draw_clutter_fading(scn, rng);

    ChannelGains g;
    g.stream_count = beams.stream_count();
    g.target_count = scn.target_count();
    g.vue_count = scn.vues.size();
    g.gate_range_m = beams.gate_range_m;
    g.per_stream_power_w = beams.per_stream_power_w;
    g.gains.resize(static_cast<std::size_t>(g.stream_count) * g.target_count);
    g.vue_mode.reserve(scn.vues.size());

    std::vector<std::complex<double>> alpha(g.target_count);
    for (std::size_t k = 0; k < scn.vues.size(); ++k) {
        alpha[k] = amp[k] * cascade_factor(vue_profiles[k], scn.vues[k].ris_incidence);
        g.vue_mode.push_back(vue_profiles[k].mode);
    }
    for (std::size_t l = 0; l < scn.clutter.size(); ++l) alpha[scn.vues.size() + l] = xi[l];

    for (int q = 0; q < g.stream_count; ++q) {
        const double sb = beams.sin_azimuth[static_cast<std::size_t>(q)];
        for (std::size_t j = 0; j < g.target_count; ++j) {
            const double coupling =
                two_way_beam_gain(scn.bs_elements, sb, std::sin(scn.target(j).azimuth_rad));
            g.gains[static_cast<std::size_t>(q) * g.target_count + j] = alpha[j] * coupling;
        }
    }
    return g;
}

// Amplitude scale that maps a summed channel gain into the normalized
// post-matched-filter decision variable: u = decision_scale * sum(g) + n with
// n standard complex Gaussian per component. |decision_scale * g|^2 then
// equals 2 * gamma for a single matched echo.
inline double decision_scale(const RadioParams& radio, double per_stream_power_w) {
    const double gain = per_stream_power_w * radio.repetition_factor *
                        radio.time_bandwidth_product;
    return std::sqrt(2.0 * gain) / std::sqrt(radio.noise_power_w());
}

// Effective post-integration noise power sigma_z^2 / (P * TB).
inline double effective_noise_w(const RadioParams& radio) {
    return radio.noise_power_w() /
           (radio.repetition_factor * radio.time_bandwidth_product);
}

} // namespace t2u
