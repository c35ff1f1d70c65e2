#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "t2u/analytics.hpp"
#include "t2u/config.hpp"
#include "t2u/gps.hpp"
#include "t2u/mc.hpp"
#include "t2u/results.hpp"

namespace t2u {

namespace detail {

// "key=value,key=value" with keys emitted in alphabetical order.
inline std::string sweep_string(std::vector<std::pair<std::string, std::string>> kv) {
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) {
        if (!out.empty()) out += ',';
        out += k;
        out += '=';
        out += v;
    }
    return out;
}

struct RecordSink {
    std::vector<ResultRecord> records;
    std::string experiment;
    std::uint64_t seed = 0;
    std::string hash;

    void add(std::string sweep, std::string metric, double value, double ci,
             std::uint64_t trials) {
        ResultRecord r;
        r.experiment = experiment;
        r.sweep = std::move(sweep);
        r.metric = std::move(metric);
        r.value = value;
        r.ci_half_width = ci;
        r.trials = trials;
        r.seed = seed;
        r.config_hash = hash;
        records.push_back(std::move(r));
    }
};

inline TrialSettings trial_settings(const ExperimentConfig& cfg) {
    TrialSettings s;
    s.scenario = cfg.scenario;
    s.decoder = cfg.decoder;
    s.signaling = cfg.signaling;
    return s;
}

inline std::vector<ResultRecord> run_roc(const ExperimentConfig& cfg) {
    RecordSink sink{{}, "roc", cfg.seed, config_hash(cfg)};
    std::uint64_t combo = 0;
    for (const double rho : cfg.density_sweep) {
        for (const double beta : cfg.beta_c_db_list) {
            const auto curve = roc_curve(cfg.scenario, beta, rho, cfg.p_fa_grid, cfg.drops,
                                         substream_seed(cfg.seed, combo));
            ++combo;
            for (std::size_t i = 0; i < curve.p_fa.size(); ++i) {
                sink.add(sweep_string({{"beta_c_db", format_double(beta)},
                                       {"p_fa", format_double(curve.p_fa[i])},
                                       {"rho", format_double(rho)}}),
                         "p_cd", curve.p_cd[i], 1.96 * curve.p_cd_std_error[i],
                         static_cast<std::uint64_t>(cfg.drops));
            }
        }
    }
    return std::move(sink.records);
}

inline std::vector<ResultRecord> run_ris_size(const ExperimentConfig& cfg) {
    RecordSink sink{{}, "ris_size", cfg.seed, config_hash(cfg)};
    const double probe_rcs = ris_radar_cross_section_m2(
        cfg.scenario.ris_elements, cfg.scenario.radio.carrier_frequency_hz);
    std::uint64_t combo = 0;
    for (const double rho : cfg.density_sweep) {
        for (const double beta : cfg.beta_c_db_list) {
            const double clutter_dbm2 = linear_to_db(db_to_linear(beta) * probe_rcs);
            const auto sizing = minimum_ris_size(
                cfg.scenario, cfg.p_cd_target, cfg.scenario.radio.false_alarm_target,
                clutter_dbm2, rho, cfg.drops, substream_seed(cfg.seed, combo), 1,
                cfg.ris_side_max);
            ++combo;
            const auto sweep = sweep_string(
                {{"beta_c_db", format_double(beta)}, {"rho", format_double(rho)}});
            const auto n = static_cast<std::uint64_t>(cfg.drops);
            sink.add(sweep, "ris_side_m", sizing.side_length_m, 0.0, n);
            sink.add(sweep, "ris_elements", static_cast<double>(sizing.elements), 0.0, n);
            sink.add(sweep, "achieved_p_cd", sizing.achieved_p_cd, 0.0, n);
            sink.add(sweep, "saturated", sizing.saturated ? 1.0 : 0.0, 0.0, n);
        }
    }
    return std::move(sink.records);
}

inline std::vector<ResultRecord> run_pca(const ExperimentConfig& cfg) {
    RecordSink sink{{}, "pca", cfg.seed, config_hash(cfg)};
    std::vector<double> densities = {cfg.scenario.clutter.density_per_m2};
    if (cfg.include_no_clutter && cfg.scenario.clutter.density_per_m2 > 0.0)
        densities.push_back(0.0);

    std::uint64_t combo = 0;
    for (const double rho : densities) {
        for (const int n : cfg.bs_elements_sweep) {
            TrialSettings settings = trial_settings(cfg);
            settings.scenario.bs_elements = n;
            settings.scenario.clutter.density_per_m2 = rho;
            const std::uint64_t sub = substream_seed(cfg.seed, combo);
            ++combo;
            const auto trials = static_cast<std::uint64_t>(cfg.trials);

            const auto ris = estimate_association(settings, cfg.trials, sub);
            const auto ris_sweep = sweep_string({{"bs_elements", std::to_string(n)},
                                                 {"method", "ris"},
                                                 {"rho", format_double(rho)}});
            sink.add(ris_sweep, "pca", ris.pca.value, ris.pca.ci_half_width, trials);
            sink.add(ris_sweep, "p_cd", ris.pcd.value, ris.pcd.ci_half_width, trials);

            const auto gps = estimate_association_gps(settings, cfg.sigma_gps_m,
                                                      cfg.trials, sub);
            for (const auto& g : gps) {
                const auto gps_sweep =
                    sweep_string({{"bs_elements", std::to_string(n)},
                                  {"method", "gps"},
                                  {"rho", format_double(rho)},
                                  {"sigma_gps_m", format_double(g.sigma_m)}});
                sink.add(gps_sweep, "pca", g.estimate.pca.value,
                         g.estimate.pca.ci_half_width, trials);
                sink.add(gps_sweep, "p_cd", g.estimate.pcd.value,
                         g.estimate.pcd.ci_half_width, trials);
            }
        }
    }
    return std::move(sink.records);
}

// Expected-fading SNR of each VUE's beam with every surface reflecting:
// deterministic given the scenario, used for the single-run report.
inline double expected_snr(const Scenario& scn, const Beamformers& beams, std::size_t k) {
    const double half_bin = 0.5 * scn.radio.range_bin_m();
    const double p = beams.per_stream_power_w;
    const double m = static_cast<double>(scn.ris_elements);
    const double sb = beams.sin_azimuth[k];
    const double gate = beams.gate_range_m[k];
    double signal = 0.0;
    double interf = 0.0;
    for (std::size_t j = 0; j < scn.target_count(); ++j) {
        const Target& t = scn.target(j);
        double mean_power;
        if (j < scn.vues.size()) {
            mean_power = vue_cascade_power(t, scn.ris_elements, scn.radio) * m * m;
        } else {
            mean_power = radar_echo_gain(t.reflectivity_m2, t.range_m, scn.radio);
        }
        if (j == k) {
            const double c = two_way_beam_gain(scn.bs_elements, sb, std::sin(t.azimuth_rad));
            signal = p * mean_power * c * c;
            continue;
        }
        if (std::abs(t.range_m - gate) > half_bin) continue;
        const double c = two_way_beam_gain(scn.bs_elements, sb, std::sin(t.azimuth_rad));
        interf += p * mean_power * c * c;
    }
    return signal / (interf + effective_noise_w(scn.radio));
}

inline std::vector<ResultRecord> run_single(const ExperimentConfig& cfg) {
    RecordSink sink{{}, "run", cfg.seed, config_hash(cfg)};
    const auto scn = build_scenario(cfg.scenario, substream_seed(cfg.seed, 0));
    const auto settings = trial_settings(cfg);
    const auto est =
        estimate_association_fixed(scn, settings, cfg.trials, substream_seed(cfg.seed, 1));
    const auto beams = make_beamformers(scn);
    const auto trials = static_cast<std::uint64_t>(cfg.trials);

    sink.add("vue=all", "pca", est.pca.value, est.pca.ci_half_width, trials);
    sink.add("vue=all", "p_cd", est.pcd.value, est.pcd.ci_half_width, trials);
    for (std::size_t k = 0; k < est.per_vue.size(); ++k) {
        const auto sweep = "vue=" + std::to_string(k);
        sink.add(sweep, "pca", est.per_vue[k].value, est.per_vue[k].ci_half_width, trials);
        sink.add(sweep, "snr_db", linear_to_db(expected_snr(scn, beams, k)), 0.0, trials);
    }
    return std::move(sink.records);
}

} // namespace detail

inline std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case ExperimentKind::Roc: return detail::run_roc(cfg);
        case ExperimentKind::RisSize: return detail::run_ris_size(cfg);
        case ExperimentKind::Pca: return detail::run_pca(cfg);
        case ExperimentKind::SingleRun: return detail::run_single(cfg);
    }
    throw StructureError("unhandled experiment kind");
}

} // namespace t2u
