#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "t2u/channel.hpp"
#include "t2u/errors.hpp"
#include "t2u/mc.hpp"
#include "t2u/scenario.hpp"

namespace t2u {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 polar_to_cartesian(double range_m, double azimuth_rad) {
    return {range_m * std::cos(azimuth_rad), range_m * std::sin(azimuth_rad)};
}

inline double squared_distance(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Greedy shortest-pair-first assignment of fixes to detections. Each side is
// used at most once; equal distances resolve to the lowest fix index, then the
// lowest detection index. Returns one detection index (or -1) per fix.
inline std::vector<int> greedy_nearest_match(const std::vector<Vec2>& fixes,
                                             const std::vector<Vec2>& detections) {
    struct Pair {
        double d2;
        int fix;
        int det;
    };
    std::vector<Pair> pairs;
    pairs.reserve(fixes.size() * detections.size());
    for (int f = 0; f < static_cast<int>(fixes.size()); ++f)
        for (int d = 0; d < static_cast<int>(detections.size()); ++d)
            pairs.push_back({squared_distance(fixes[static_cast<std::size_t>(f)],
                                              detections[static_cast<std::size_t>(d)]),
                             f, d});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.fix != b.fix) return a.fix < b.fix;
        return a.det < b.det;
    });
    std::vector<int> match(fixes.size(), -1);
    std::vector<std::uint8_t> det_used(detections.size(), 0);
    std::size_t assigned = 0;
    for (const auto& p : pairs) {
        if (assigned == fixes.size()) break;
        if (match[static_cast<std::size_t>(p.fix)] >= 0 ||
            det_used[static_cast<std::size_t>(p.det)])
            continue;
        match[static_cast<std::size_t>(p.fix)] = p.det;
        det_used[static_cast<std::size_t>(p.det)] = 1;
        ++assigned;
    }
    return match;
}

struct GpsAssociationEstimate {
    double sigma_m = 0.0;
    AssociationEstimate estimate;
};

// Association baseline without identity codes: every surface back-reflects
// constantly, the BS scans a matched beam over each resolvable echo, estimates
// echo positions to within the array and bandwidth resolution, and pairs the
// VUEs' satellite fixes with the nearest echoes. A VUE associates correctly
// when its own echo is detected and its fix is paired with exactly that echo.
//
// Scenario substreams match estimate_association trial for trial, so both
// estimators see the same drop ensemble. The per-VUE fix noise is drawn once
// per trial and scaled by each sigma, keeping the sigma sweep matched as well.
inline std::vector<GpsAssociationEstimate> estimate_association_gps(
    const TrialSettings& settings, const std::vector<double>& sigmas_m, int trials,
    std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sigmas_m.empty()) throw ConfigError("need at least one GPS sigma");
    for (const double s : sigmas_m)
        if (!(s >= 0.0)) throw ConfigError("GPS sigma must be >= 0");
    settings.scenario.validate();

    const int n_vues = settings.scenario.num_vues;
    std::vector<detail::AssociationCounts> counts(sigmas_m.size());
    for (auto& c : counts) c.correct.assign(static_cast<std::size_t>(n_vues), 0);
    std::vector<std::uint64_t> vue_detections(sigmas_m.size(), 0);

    std::vector<double> sin_az, range, sorted_range;
    std::vector<std::complex<double>> alpha;
    std::vector<std::size_t> by_range;
    std::vector<std::uint8_t> detected;
    std::vector<Vec2> det_pos;
    std::vector<int> det_target;
    std::vector<Vec2> fix_noise, fixes;

    for (int t = 0; t < trials; ++t) {
        const auto scn = build_scenario(
            settings.scenario, substream_seed(seed, static_cast<std::uint64_t>(t) * 2));
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t) * 2 + 1);
        const auto amp = draw_vue_amplitudes(scn, rng);
        const auto xi = draw_clutter_fading(scn, rng);

        const std::size_t q = scn.target_count();
        const double p = scn.radio.tx_power_w() / n_vues;
        const double scale = decision_scale(scn.radio, p);
        const double tau = detection_threshold(scn.radio.false_alarm_target);
        const double half_bin = 0.5 * scn.radio.range_bin_m();
        const double on_factor = static_cast<double>(scn.ris_elements);

        sin_az.resize(q);
        range.resize(q);
        alpha.resize(q);
        for (std::size_t j = 0; j < q; ++j) {
            const Target& tg = scn.target(j);
            sin_az[j] = std::sin(tg.azimuth_rad);
            range[j] = tg.range_m;
            alpha[j] = j < scn.vues.size() ? amp[j] * on_factor : xi[j - scn.vues.size()];
        }
        by_range.resize(q);
        std::iota(by_range.begin(), by_range.end(), std::size_t{0});
        std::sort(by_range.begin(), by_range.end(),
                  [&](std::size_t a, std::size_t b) { return range[a] < range[b]; });
        sorted_range.resize(q);
        for (std::size_t i = 0; i < q; ++i) sorted_range[i] = range[by_range[i]];

        // Detection sweep: one matched beam per target, interference limited
        // to echoes inside the same range bin.
        detected.assign(q, 0);
        for (std::size_t j = 0; j < q; ++j) {
            const auto lo = std::lower_bound(sorted_range.begin(), sorted_range.end(),
                                             range[j] - half_bin) -
                            sorted_range.begin();
            const auto hi = std::upper_bound(sorted_range.begin(), sorted_range.end(),
                                             range[j] + half_bin) -
                            sorted_range.begin();
            std::complex<double> echo{0.0, 0.0};
            for (auto i = lo; i < hi; ++i) {
                const std::size_t tgt = by_range[static_cast<std::size_t>(i)];
                echo += alpha[tgt] *
                        two_way_beam_gain(scn.bs_elements, sin_az[j], sin_az[tgt]);
            }
            const std::complex<double> z = scale * echo + rng.cgauss(1.0);
            detected[j] = std::abs(z) > tau ? 1 : 0;
        }

        // Echo position estimates, uniform within the angular and range
        // resolution around the truth.
        det_pos.clear();
        det_target.clear();
        const double az_halfwidth = 1.0 / scn.bs_elements;
        for (std::size_t j = 0; j < q; ++j) {
            if (!detected[j]) continue;
            const double az = scn.target(j).azimuth_rad +
                              rng.uniform(-az_halfwidth, az_halfwidth);
            const double r = range[j] + rng.uniform(-half_bin, half_bin);
            det_pos.push_back(polar_to_cartesian(r, az));
            det_target.push_back(static_cast<int>(j));
        }

        fix_noise.resize(static_cast<std::size_t>(n_vues));
        for (auto& fn : fix_noise) fn = {rng.normal(), rng.normal()};

        for (std::size_t si = 0; si < sigmas_m.size(); ++si) {
            fixes.resize(static_cast<std::size_t>(n_vues));
            for (int k = 0; k < n_vues; ++k) {
                const Vec2 truth = polar_to_cartesian(scn.vues[static_cast<std::size_t>(k)].range_m,
                                                      scn.vues[static_cast<std::size_t>(k)].azimuth_rad);
                fixes[static_cast<std::size_t>(k)] = {
                    truth.x + sigmas_m[si] * fix_noise[static_cast<std::size_t>(k)].x,
                    truth.y + sigmas_m[si] * fix_noise[static_cast<std::size_t>(k)].y};
            }
            const auto match = greedy_nearest_match(fixes, det_pos);
            auto& cnt = counts[si];
            cnt.trials += 1;
            for (int k = 0; k < n_vues; ++k) {
                cnt.on_bits += 1;
                cnt.on_detections += detected[static_cast<std::size_t>(k)] ? 1 : 0;
                const int m = match[static_cast<std::size_t>(k)];
                const bool own_echo = m >= 0 && det_target[static_cast<std::size_t>(m)] == k;
                if (detected[static_cast<std::size_t>(k)] && own_echo)
                    cnt.correct[static_cast<std::size_t>(k)] += 1;
            }
        }
    }

    std::vector<GpsAssociationEstimate> out;
    out.reserve(sigmas_m.size());
    for (std::size_t si = 0; si < sigmas_m.size(); ++si)
        out.push_back({sigmas_m[si], counts[si].finalize()});
    return out;
}

} // namespace t2u
