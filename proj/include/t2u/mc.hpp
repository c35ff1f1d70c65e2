#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "t2u/analytics.hpp"
#include "t2u/arrays.hpp"
#include "t2u/channel.hpp"
#include "t2u/errors.hpp"
#include "t2u/hadamard.hpp"
#include "t2u/scenario.hpp"

namespace t2u {

// Beam bank serving the scenario's VUEs: one stream per VUE, steered and range
// gated at the true position, with an even split of the transmit power.
inline Beamformers make_beamformers(const Scenario& scn) {
    const int s = static_cast<int>(scn.vues.size());
    if (s > scn.bs_elements)
        throw StructureError("stream count exceeds BS element count");
    Beamformers b;
    b.bs_elements = scn.bs_elements;
    b.per_stream_power_w = scn.radio.tx_power_w() / s;
    b.sin_azimuth.reserve(scn.vues.size());
    b.gate_range_m.reserve(scn.vues.size());
    for (const auto& v : scn.vues) {
        b.sin_azimuth.push_back(std::sin(v.azimuth_rad));
        b.gate_range_m.push_back(v.range_m);
    }
    b.validate();
    return b;
}

struct DecoderSettings {
    // Standard accepts up to c/2 - 1 bit flips; Conservative stops at half the
    // minimum distance, below which the correlation argmax provably stays put.
    enum class Radius { Standard, Conservative };
    Radius radius = Radius::Standard;

    int decision_radius(int code_length) const {
        return radius == Radius::Standard ? default_decision_radius(code_length)
                                          : guaranteed_decision_radius(code_length);
    }
};

struct SignalingSettings {
    RisMode idle_mode = RisMode::RandomScatter;
    double leakage_power_ratio = 0.0;  // off-bit reflected power fraction
};

struct BeamOutcome {
    std::vector<std::uint8_t> detections;  // per code bit
    std::vector<double> amplitudes;        // envelope of the decision variable
    int best_row = -1;                     // correlation argmax among usable rows
    int best_score = std::numeric_limits<int>::min();
    int associated_vue = -1;  // -1 when no identity was accepted
};

struct TrialOutcome {
    std::vector<BeamOutcome> beams;          // one per VUE stream
    std::vector<std::uint8_t> detected_ref;  // detection in the VUE's first on-bit
    std::vector<std::uint8_t> correct;       // detected and decoded to itself
};

// One coherent code frame: every VUE keys its surface with its codebook row
// while the BS runs per-stream envelope detection and bipolar correlation.
// Echoes that share a beam's range-azimuth cell without belonging to it
// (other VUEs at full reflection, clutter at its drawn fading) enter the
// decision variable as Gaussian noise of their combined realized power, the
// same treatment the closed-form SINR applies, and the threshold normalizes
// per cell. The no-signal crossing rate is then exactly the false-alarm
// target and on-bit detection follows the Rician tail of the per-cell SINR.
// The supplied stream provides, in order: per-VUE echo phases, clutter fading,
// off-bit scatter profiles (only if leaky), then per-beam per-bit noise.
inline TrialOutcome run_trial(const Scenario& scn, const Beamformers& beams,
                              const HadamardCodebook& codebook, const DecoderSettings& decoder,
                              const SignalingSettings& signaling, Rng& rng) {
    beams.validate();
    if (codebook.length != scn.code_length)
        throw StructureError("codebook length disagrees with scenario code length");
    if (beams.stream_count() != static_cast<int>(scn.vues.size()))
        throw StructureError("expected exactly one beam per VUE");
    if (beams.bs_elements != scn.bs_elements)
        throw StructureError("beamformer BS element count disagrees with scenario");

    const int c = codebook.length;
    const int n_vues = static_cast<int>(scn.vues.size());
    const double scale = decision_scale(scn.radio, beams.per_stream_power_w);
    const double tau = detection_threshold(scn.radio.false_alarm_target);
    const double half_bin = 0.5 * scn.radio.range_bin_m();

    const auto amp = draw_vue_amplitudes(scn, rng);
    const auto xi = draw_clutter_fading(scn, rng);

    // Off-bit cascade factors per (VUE, bit). With zero leakage the off state
    // reflects nothing and no scatter profiles are drawn.
    const bool leaky = signaling.leakage_power_ratio > 0.0 &&
                       signaling.idle_mode != RisMode::Off;
    std::vector<std::complex<double>> off_factor;
    if (leaky) {
        off_factor.resize(static_cast<std::size_t>(n_vues) * c);
        for (int k = 0; k < n_vues; ++k) {
            const auto* row = codebook.row(scn.vues[static_cast<std::size_t>(k)].code_row);
            for (int b = 0; b < c; ++b) {
                if (row[b]) continue;
                const auto p = idle_profile(scn.ris_elements, signaling.idle_mode,
                                            signaling.leakage_power_ratio, rng);
                off_factor[static_cast<std::size_t>(k) * c + b] =
                    cascade_factor(p, scn.vues[static_cast<std::size_t>(k)].ris_incidence);
            }
        }
    }

    // On-bit cascade: a back-reflection profile built for the VUE's own
    // incidence sums to exactly the element count.
    const double on_factor = static_cast<double>(scn.ris_elements);

    TrialOutcome out;
    out.beams.resize(static_cast<std::size_t>(n_vues));
    out.detected_ref.assign(static_cast<std::size_t>(n_vues), 0);
    out.correct.assign(static_cast<std::size_t>(n_vues), 0);

    std::vector<int> gated_vues;
    std::vector<std::complex<double>> gated_vue_base;
    for (int q = 0; q < n_vues; ++q) {
        BeamOutcome& beam = out.beams[static_cast<std::size_t>(q)];
        beam.detections.resize(static_cast<std::size_t>(c));
        beam.amplitudes.resize(static_cast<std::size_t>(c));

        const double sb = beams.sin_azimuth[static_cast<std::size_t>(q)];
        const double gate = beams.gate_range_m[static_cast<std::size_t>(q)];

        gated_vues.clear();
        gated_vue_base.clear();
        for (int k = 0; k < n_vues; ++k) {
            const auto& v = scn.vues[static_cast<std::size_t>(k)];
            if (std::abs(v.range_m - gate) > half_bin) continue;
            gated_vues.push_back(k);
            gated_vue_base.push_back(
                amp[static_cast<std::size_t>(k)] *
                two_way_beam_gain(scn.bs_elements, sb, std::sin(v.azimuth_rad)));
        }
        double cell_interference = 0.0;  // realized power of everything but q's echo
        for (std::size_t l = 0; l < scn.clutter.size(); ++l) {
            const auto& t = scn.clutter[l];
            if (std::abs(t.range_m - gate) > half_bin) continue;
            cell_interference += std::norm(
                xi[l] * two_way_beam_gain(scn.bs_elements, sb, std::sin(t.azimuth_rad)));
        }
        std::ptrdiff_t own = -1;
        for (std::size_t i = 0; i < gated_vues.size(); ++i) {
            if (gated_vues[i] == q) {
                own = static_cast<std::ptrdiff_t>(i);
                continue;
            }
            cell_interference += std::norm(gated_vue_base[i] * on_factor);
        }
        const double sigma_cell =
            std::sqrt(1.0 + 0.5 * scale * scale * cell_interference);
        const double tau_cell = tau * sigma_cell;
        const auto* own_row = codebook.row(scn.vues[static_cast<std::size_t>(q)].code_row);

        for (int b = 0; b < c; ++b) {
            std::complex<double> echo{0.0, 0.0};
            if (own >= 0) {
                std::complex<double> f{0.0, 0.0};
                if (own_row[b])
                    f = on_factor;
                else if (leaky)
                    f = off_factor[static_cast<std::size_t>(q) * c + b];
                echo = gated_vue_base[static_cast<std::size_t>(own)] * f;
            }
            const std::complex<double> z = scale * echo + sigma_cell * rng.cgauss(1.0);
            const double a = std::abs(z);
            beam.amplitudes[static_cast<std::size_t>(b)] = a;
            beam.detections[static_cast<std::size_t>(b)] = a > tau_cell ? 1 : 0;
        }

        // Identity decode over every usable (balanced) row, lowest row wins ties.
        for (int r = 1; r < c; ++r) {
            const int score =
                correlate_bipolar(beam.detections.data(), codebook.row(r), c);
            if (score > beam.best_score) {
                beam.best_score = score;
                beam.best_row = r;
            }
        }
        const int accept = c - 2 * decoder.decision_radius(c);
        if (beam.best_score >= accept && beam.best_row - 1 < n_vues)
            beam.associated_vue = beam.best_row - 1;
    }

    for (int k = 0; k < n_vues; ++k) {
        const auto* row = codebook.row(scn.vues[static_cast<std::size_t>(k)].code_row);
        int ref_bit = -1;
        for (int b = 0; b < c; ++b)
            if (row[b]) {
                ref_bit = b;
                break;
            }
        const BeamOutcome& beam = out.beams[static_cast<std::size_t>(k)];
        const bool det = ref_bit >= 0 && beam.detections[static_cast<std::size_t>(ref_bit)];
        out.detected_ref[static_cast<std::size_t>(k)] = det ? 1 : 0;
        out.correct[static_cast<std::size_t>(k)] =
            (det && beam.associated_vue == k) ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rate estimation

struct RateEstimate {
    double value = 0.0;
    double ci_half_width = 0.0;  // 95% Wilson interval half width
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

inline RateEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw StructureError("rate estimate needs at least one trial");
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double s = static_cast<double>(successes);
    const double z2 = z * z;
    RateEstimate e;
    e.successes = successes;
    e.trials = trials;
    e.value = s / n;
    const double center = (s + 0.5 * z2) / (n + z2);
    const double hw = z * std::sqrt(s * (n - s) / n + 0.25 * z2) / (n + z2);
    // Report the empirical rate; widen the Wilson interval so it still covers
    // the recentring shift.
    e.ci_half_width = hw + std::abs(center - e.value);
    return e;
}

struct AssociationEstimate {
    RateEstimate pca;                   // pooled correct-association rate
    RateEstimate pcd;                   // pooled on-bit detection rate
    std::vector<RateEstimate> per_vue;  // per-VUE association rates
};

struct TrialSettings {
    ScenarioConfig scenario{};
    DecoderSettings decoder{};
    SignalingSettings signaling{};
};

namespace detail {

struct AssociationCounts {
    std::vector<std::uint64_t> correct;  // per VUE
    std::uint64_t on_bits = 0;
    std::uint64_t on_detections = 0;
    std::uint64_t trials = 0;

    void absorb(const Scenario& scn, const HadamardCodebook& cb, const TrialOutcome& out) {
        trials += 1;
        for (std::size_t k = 0; k < scn.vues.size(); ++k) {
            correct[k] += out.correct[k];
            const auto* row = cb.row(scn.vues[k].code_row);
            const auto& beam = out.beams[k];
            for (int b = 0; b < cb.length; ++b) {
                if (!row[b]) continue;
                on_bits += 1;
                on_detections += beam.detections[static_cast<std::size_t>(b)] ? 1 : 0;
            }
        }
    }

    AssociationEstimate finalize() const {
        AssociationEstimate est;
        std::uint64_t total = 0;
        est.per_vue.reserve(correct.size());
        for (const auto s : correct) {
            est.per_vue.push_back(wilson_estimate(s, trials));
            total += s;
        }
        est.pca = wilson_estimate(total, trials * correct.size());
        est.pcd = wilson_estimate(on_detections, on_bits);
        return est;
    }
};

} // namespace detail

// Monte Carlo association performance over independent drops. Trial t builds
// its scenario from substream 2t and its in-trial randomness from substream
// 2t + 1 of the master seed.
inline AssociationEstimate estimate_association(const TrialSettings& settings, int trials,
                                                std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    settings.scenario.validate();
    const int code_len = settings.scenario.code_length
                             ? *settings.scenario.code_length
                             : code_length_for(settings.scenario.num_vues);
    const HadamardCodebook codebook = HadamardCodebook::with_length(code_len);

    detail::AssociationCounts counts;
    counts.correct.assign(static_cast<std::size_t>(settings.scenario.num_vues), 0);
    for (int t = 0; t < trials; ++t) {
        const auto scn = build_scenario(
            settings.scenario, substream_seed(seed, static_cast<std::uint64_t>(t) * 2));
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t) * 2 + 1);
        const auto beams = make_beamformers(scn);
        const auto out = run_trial(scn, beams, codebook, settings.decoder,
                                   settings.signaling, rng);
        counts.absorb(scn, codebook, out);
    }
    return counts.finalize();
}

// Same estimator on one frozen scenario (fresh noise, fading and phases per
// trial). Used by the fixed-seed single-run experiment.
inline AssociationEstimate estimate_association_fixed(const Scenario& scn,
                                                      const TrialSettings& settings, int trials,
                                                      std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    const HadamardCodebook codebook = HadamardCodebook::with_length(scn.code_length);
    const auto beams = make_beamformers(scn);
    detail::AssociationCounts counts;
    counts.correct.assign(scn.vues.size(), 0);
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t) * 2 + 1);
        const auto out = run_trial(scn, beams, codebook, settings.decoder,
                                   settings.signaling, rng);
        counts.absorb(scn, codebook, out);
    }
    return counts.finalize();
}

} // namespace t2u
