#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "t2u/channel.hpp"
#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/ris.hpp"
#include "t2u/scenario.hpp"

namespace t2u {

// First-order Marcum Q function Q_1(a, b), evaluated as the Poisson mixture of
// noncentral chi-square tail masses:
//   Q_1(a, b) = sum_k Pois(k; a^2/2) * P(Gamma(k+1) > b^2/2),
// with both factor sequences accumulated in the log domain. Absolute error is
// dominated by the truncation of the Poisson bulk, kept below ~1e-13.
inline double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw ConfigError("marcum_q1 requires a, b >= 0");
    if (b == 0.0) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);
    // |a - b| >= 12 puts the missing mass below exp(-72); both clips are exact
    // to well past the accuracy target.
    if (a - b >= 12.0) return 1.0;
    if (b - a >= 12.0) return 0.0;

    const double lambda = 0.5 * a * a;  // Poisson mean
    const double y = 0.5 * b * b;
    const double log_lambda = std::log(lambda);
    const double log_y = std::log(y);
    const int k_max =
        static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda + 1.0) + 30.0));

    double log_pois = -lambda;    // log Pois(k; lambda) at k = 0
    double log_term = -y;         // log of y^j e^-y / j! at j = 0
    double tail = std::exp(log_term);  // P(Gamma(k+1) > y) accumulated in linear space
    double q = std::exp(log_pois) * tail;
    for (int k = 1; k <= k_max; ++k) {
        const double lk = std::log(static_cast<double>(k));
        log_pois += log_lambda - lk;
        log_term += log_y - lk;
        tail = std::min(1.0, tail + std::exp(log_term));
        q += std::exp(log_pois) * tail;
    }
    return std::min(1.0, q);
}

// Per-cell detection probability of a steady echo at post-integration SNR
// gamma with a CFAR threshold set for false-alarm probability p_fa:
//   Q_1(sqrt(2*gamma), sqrt(-2*ln p_fa)).
inline double detection_probability(double gamma, double p_fa) {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (!(p_fa > 0.0) || !(p_fa < 1.0)) throw ConfigError("p_fa must lie in (0, 1)");
    return marcum_q1(std::sqrt(2.0 * gamma), std::sqrt(-2.0 * std::log(p_fa)));
}

// Normalized envelope threshold corresponding to a false-alarm target.
inline double detection_threshold(double p_fa) {
    if (!(p_fa > 0.0) || !(p_fa < 1.0)) throw ConfigError("p_fa must lie in (0, 1)");
    return std::sqrt(-2.0 * std::log(p_fa));
}

// Probability of flipping one on-off keyed code bit at SNR gamma:
//   0.5 * erfc(sqrt(gamma / 2)).
inline double bit_error_probability(double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    return 0.5 * std::erfc(std::sqrt(0.5 * gamma));
}

// Default code-decision radius: bit-error patterns up to this weight count as
// a correctly recovered identity.
inline int default_decision_radius(int code_length) { return code_length / 2 - 1; }

// Flip count below which the bipolar correlation argmax provably cannot move
// off the transmitted row (half the minimum distance, exclusive).
inline int guaranteed_decision_radius(int code_length) {
    return (code_length / 2 - 1) / 2;
}

namespace detail {

inline double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(Binomial(n, p) <= k), log-domain terms.
inline double binomial_cdf(int n, double p, int k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) acc += std::exp(log_choose(n, i) + i * lp + (n - i) * lq);
    return std::min(1.0, acc);
}

} // namespace detail

// Probability that a length-c identity code survives per-bit errors at SNR
// gamma, i.e. that at most `radius` of the c bits flip. radius < 0 selects the
// default c/2 - 1.
inline double code_detection_probability(double gamma, int code_length, int radius = -1) {
    if (code_length < 2 || (code_length & (code_length - 1)) != 0)
        throw ConfigError("code length must be a power of two >= 2");
    const int r = radius < 0 ? default_decision_radius(code_length) : radius;
    if (r < 0 || r >= code_length) throw ConfigError("decision radius out of range");
    return detail::binomial_cdf(code_length, bit_error_probability(gamma), r);
}

// Correct-association probability: the echo must be detected in its cell and
// its identity code recovered.
inline double association_probability(double gamma, double p_fa, int code_length,
                                      int radius = -1) {
    return code_detection_probability(gamma, code_length, radius) *
           detection_probability(gamma, p_fa);
}

// ---------------------------------------------------------------------------
// Per-beam SNR decomposition

struct SnrReport {
    double signal_power_w = 0.0;
    double vue_interference_w = 0.0;
    double clutter_interference_w = 0.0;
    double effective_noise_w = 0.0;
    bool gated = true;

    double snr() const {
        return signal_power_w /
               (vue_interference_w + clutter_interference_w + effective_noise_w);
    }
    double snr_db() const { return linear_to_db(snr()); }
};

// SNR of the echo of VUE `vue_index` in its own beam, under the given gain
// realization. Interference counts only targets whose delay falls inside the
// beam's range-resolution bin; scatterers outside it land in other matched
// filter cells and are dropped.
inline SnrReport snr_report(const Scenario& scn, const ChannelGains& gains,
                            std::size_t vue_index) {
    if (vue_index >= scn.vues.size()) throw StructureError("vue index out of range");
    if (gains.target_count != scn.target_count() ||
        gains.vue_count != scn.vues.size())
        throw StructureError("gain matrix does not match scenario");
    const int q = static_cast<int>(vue_index);
    if (q >= gains.stream_count) throw StructureError("no beam column for this VUE");

    const double gate = gains.gate_range_m[vue_index];
    const double half_bin = 0.5 * scn.radio.range_bin_m();
    const double p = gains.per_stream_power_w;

    SnrReport rep;
    rep.effective_noise_w = effective_noise_w(scn.radio);
    for (std::size_t j = 0; j < gains.target_count; ++j) {
        const double power = p * std::norm(gains.at(q, j));
        if (j == vue_index) {
            rep.signal_power_w = power;
            continue;
        }
        if (std::abs(scn.target(j).range_m - gate) > half_bin) continue;
        if (j < gains.vue_count)
            rep.vue_interference_w += power;
        else
            rep.clutter_interference_w += power;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Semi-analytic detection performance over clutter drops

struct DetectionCurve {
    std::vector<double> p_fa;
    std::vector<double> p_cd;            // mean over drops at each p_fa
    std::vector<double> p_cd_std_error;  // drop-to-drop standard error of the mean
    double beta_c_db = 0.0;
    double clutter_density_per_m2 = 0.0;
    int drops = 0;
};

namespace detail {

// Interference-plus-noise realizations for a probe VUE parked at the cell
// edge. Returns, per drop, the gated clutter power sum (relative units:
// per-stream power already applied) and alongside it the fixed signal power
// coefficient per unit of M^2-normalized RCS; gamma then follows for any
// surface size without re-dropping the clutter.
struct EdgeProbeDrops {
    double signal_power_w = 0.0;     // for the configured ris_elements
    double noise_w = 0.0;
    std::vector<double> interference_w;  // one entry per drop
};

inline EdgeProbeDrops edge_probe_drops(const ScenarioConfig& base, double clutter_mean_dbm2,
                                       double density_per_m2, int drops, std::uint64_t seed) {
    if (drops < 1) throw ConfigError("drops must be >= 1");
    ScenarioConfig cfg = base;
    cfg.num_vues = 1;
    cfg.fixed_vue_positions = std::vector<PolarPosition>{{cfg.radio.cell_radius_m, 0.0}};
    cfg.clutter.density_per_m2 = density_per_m2;
    cfg.clutter.mean_reflectivity_dbm2 = clutter_mean_dbm2;
    cfg.clutter.reflectivity_std_db = 0.0;
    cfg.validate();

    // The probe borrows one of the configured number of downlink streams, so
    // the power split matches the loaded system it stands in for.
    const int streams = std::max(1, base.num_vues);
    const double p = cfg.radio.tx_power_w() / streams;

    EdgeProbeDrops out;
    out.noise_w = effective_noise_w(cfg.radio);
    const double edge = cfg.radio.cell_radius_m;
    const double half_bin = 0.5 * cfg.radio.range_bin_m();
    out.interference_w.reserve(static_cast<std::size_t>(drops));

    for (int d = 0; d < drops; ++d) {
        const std::uint64_t scn_seed = substream_seed(seed, static_cast<std::uint64_t>(d) * 2);
        Rng noise_rng = Rng::substream(seed, static_cast<std::uint64_t>(d) * 2 + 1);
        const Scenario scn = build_scenario(cfg, scn_seed);
        if (d == 0) {
            const double cascade_power =
                vue_cascade_power(scn.vues[0], cfg.ris_elements, cfg.radio);
            const double m = static_cast<double>(cfg.ris_elements);
            const double n = static_cast<double>(cfg.bs_elements);
            out.signal_power_w = p * cascade_power * m * m * n * n;
        }
        double interf = 0.0;
        const double sin_beam = std::sin(scn.vues[0].azimuth_rad);
        for (const auto& c : scn.clutter) {
            if (std::abs(c.range_m - edge) > half_bin) continue;
            const double coupling =
                two_way_beam_gain(cfg.bs_elements, sin_beam, std::sin(c.azimuth_rad));
            const double mean_echo = radar_echo_gain(c.reflectivity_m2, c.range_m, cfg.radio);
            const double fading = std::norm(noise_rng.cgauss(0.5));  // Exp(1) power fade
            interf += p * fading * mean_echo * coupling * coupling;
        }
        out.interference_w.push_back(interf);
    }
    return out;
}

} // namespace detail

// Mean cell-edge detection probability against false-alarm target, averaged
// over Poisson clutter drops. Clutter reflectivity is pinned to beta_c_db
// relative to the probe surface's aggregate RCS; fading redraws per drop.
inline DetectionCurve roc_curve(const ScenarioConfig& base, double beta_c_db,
                                double density_per_m2, std::vector<double> p_fa_grid,
                                int drops, std::uint64_t seed) {
    if (p_fa_grid.empty()) throw ConfigError("p_fa grid must not be empty");
    for (auto& f : p_fa_grid) f = std::clamp(f, 1e-6, 1.0 - 1e-6);

    const double probe_rcs =
        ris_radar_cross_section_m2(base.ris_elements, base.radio.carrier_frequency_hz);
    const double clutter_dbm2 = linear_to_db(db_to_linear(beta_c_db) * probe_rcs);
    const auto env =
        detail::edge_probe_drops(base, clutter_dbm2, density_per_m2, drops, seed);

    DetectionCurve curve;
    curve.p_fa = p_fa_grid;
    curve.beta_c_db = beta_c_db;
    curve.clutter_density_per_m2 = density_per_m2;
    curve.drops = drops;
    curve.p_cd.resize(p_fa_grid.size(), 0.0);
    curve.p_cd_std_error.resize(p_fa_grid.size(), 0.0);
    std::vector<double> sumsq(p_fa_grid.size(), 0.0);
    for (const double interf : env.interference_w) {
        const double gamma = env.signal_power_w / (interf + env.noise_w);
        for (std::size_t i = 0; i < p_fa_grid.size(); ++i) {
            const double pcd = detection_probability(gamma, p_fa_grid[i]);
            curve.p_cd[i] += pcd;
            sumsq[i] += pcd * pcd;
        }
    }
    const double nd = static_cast<double>(drops);
    for (std::size_t i = 0; i < p_fa_grid.size(); ++i) {
        curve.p_cd[i] /= nd;
        const double var = std::max(0.0, sumsq[i] / nd - curve.p_cd[i] * curve.p_cd[i]);
        curve.p_cd_std_error[i] = drops > 1 ? std::sqrt(var / (nd - 1.0)) : 0.0;
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Smallest surface reaching a detection target

struct RisSizing {
    int side = 0;
    int elements = 0;
    double side_length_m = 0.0;
    double achieved_p_cd = 0.0;
    bool saturated = false;  // even the largest probed surface missed the target
};

// Smallest square RIS whose cell-edge mean detection probability reaches
// p_cd_target at the given false-alarm target, in ambient clutter of fixed
// absolute reflectivity. The clutter realizations are shared across candidate
// sizes (signal power alone scales with M^2), making the objective monotone
// in the side length; plain bisection finds the threshold side.
inline RisSizing minimum_ris_size(const ScenarioConfig& base, double p_cd_target, double p_fa,
                                  double clutter_mean_dbm2, double density_per_m2, int drops,
                                  std::uint64_t seed, int side_min = 1, int side_max = 512) {
    if (!(p_cd_target > 0.0) || !(p_cd_target < 1.0))
        throw ConfigError("p_cd_target must lie in (0, 1)");
    if (side_min < 1 || side_max < side_min) throw ConfigError("bad side bounds");

    const auto env =
        detail::edge_probe_drops(base, clutter_mean_dbm2, density_per_m2, drops, seed);
    const double base_m = static_cast<double>(base.ris_elements);

    // signal ~ RCS(M) ~ M^2 = side^4; everything else in env is size-free
    const auto mean_pcd = [&](int side) {
        const double m = static_cast<double>(side) * side;
        const double scale = (m / base_m) * (m / base_m);
        double acc = 0.0;
        for (const double interf : env.interference_w)
            acc += detection_probability(env.signal_power_w * scale / (interf + env.noise_w),
                                         p_fa);
        return acc / static_cast<double>(env.interference_w.size());
    };

    RisSizing out;
    if (mean_pcd(side_max) < p_cd_target) {
        out.side = side_max;
        out.saturated = true;
    } else {
        int lo = side_min;  // below target (or the floor)
        int hi = side_max;  // at or above target
        if (mean_pcd(side_min) >= p_cd_target) {
            hi = side_min;
        } else {
            while (hi - lo > 1) {
                const int mid = lo + (hi - lo) / 2;
                (mean_pcd(mid) >= p_cd_target ? hi : lo) = mid;
            }
        }
        out.side = hi;
    }
    out.elements = out.side * out.side;
    out.side_length_m = ris_side_length_m(out.elements, base.radio.carrier_frequency_hz);
    out.achieved_p_cd = mean_pcd(out.side);
    return out;
}

} // namespace t2u
