#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "t2u/constants.hpp"
#include "t2u/errors.hpp"
#include "t2u/mc.hpp"
#include "t2u/scenario.hpp"

namespace t2u {

enum class ExperimentKind { Roc, RisSize, Pca, SingleRun };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Roc: return "roc";
        case ExperimentKind::RisSize: return "ris_size";
        case ExperimentKind::Pca: return "pca";
        case ExperimentKind::SingleRun: return "run";
    }
    return "?";
}

// Full experiment description. Everything here round-trips through a flat JSON
// object; defaults below are what an empty config resolves to.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SingleRun;
    bool kind_explicit = false;  // true when the config file named the experiment
    ScenarioConfig scenario{};
    DecoderSettings decoder{};
    SignalingSettings signaling{};

    std::vector<int> bs_elements_sweep = {16, 32, 64};        // pca sweep
    std::vector<double> density_sweep = {0.2, 0.4};           // roc / sizing clutter densities
    std::vector<double> beta_c_db_list = {-20.0, -10.0, 0.0}; // clutter-to-surface RCS ratios
    std::vector<double> sigma_gps_m = {1.0, 4.0, 8.0};        // satellite fix error levels
    std::vector<double> p_fa_grid = {1e-3, 2e-3, 5e-3, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
    bool include_no_clutter = true;  // pca: also evaluate a clutter-free family
    double p_cd_target = 0.99;       // sizing target
    int ris_side_max = 512;          // sizing search upper bound
    int trials = 1000;
    int drops = 500;
    std::uint64_t seed = 1;

    void validate() const {
        scenario.validate();
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (drops < 1) throw ConfigError("drops must be >= 1");
        if (!(p_cd_target > 0.0) || !(p_cd_target < 1.0))
            throw ConfigError("p_cd_target must lie in (0, 1)");
        if (ris_side_max < 1) throw ConfigError("ris_side_max must be >= 1");
        if (bs_elements_sweep.empty()) throw ConfigError("bs_elements_sweep must not be empty");
        for (const int n : bs_elements_sweep)
            if (n < 1) throw ConfigError("bs_elements_sweep entries must be >= 1");
        if (density_sweep.empty()) throw ConfigError("density_sweep must not be empty");
        for (const double r : density_sweep)
            if (r < 0.0) throw ConfigError("density_sweep entries must be >= 0");
        if (p_fa_grid.empty()) throw ConfigError("p_fa_grid must not be empty");
        for (const double f : p_fa_grid)
            if (!(f > 0.0) || !(f < 1.0)) throw ConfigError("p_fa_grid entries must lie in (0, 1)");
        if (sigma_gps_m.empty()) throw ConfigError("sigma_gps_m must not be empty");
        for (const double s : sigma_gps_m)
            if (s < 0.0) throw ConfigError("sigma_gps_m entries must be >= 0");
    }
};

namespace detail {

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "experiment", "carrier_frequency_hz", "bandwidth_hz", "tx_power_dbm",
        "noise_power_dbm", "cell_radius_m", "pulse_time_s", "repetition_factor",
        "time_bandwidth_product", "false_alarm_target", "num_vues", "bs_elements",
        "ris_elements", "clutter_density_per_m2", "clutter_reflectivity_dbm2",
        "clutter_reflectivity_std_db", "incidence_psi_max_deg", "max_speed_mps",
        "min_range_m", "code_length", "fixed_vue_positions", "idle_mode", "leakage_db",
        "decoder_radius", "bs_elements_sweep", "density_sweep", "beta_c_db_list",
        "sigma_gps_m", "p_fa_grid", "include_no_clutter", "p_cd_target", "ris_side_max",
        "trials", "drops", "seed"};
    return keys;
}

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

inline ExperimentKind parse_kind(const std::string& s) {
    if (s == "roc") return ExperimentKind::Roc;
    if (s == "ris_size" || s == "ris-size") return ExperimentKind::RisSize;
    if (s == "pca") return ExperimentKind::Pca;
    if (s == "run") return ExperimentKind::SingleRun;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

inline RisMode parse_idle_mode(const std::string& s) {
    if (s == "specular") return RisMode::Specular;
    if (s == "random_scatter") return RisMode::RandomScatter;
    if (s == "off") return RisMode::Off;
    throw ConfigError("idle_mode must be specular, random_scatter or off");
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& item : j.items())
        if (detail::known_config_keys().count(item.key()) == 0)
            throw ConfigError("unknown config key '" + item.key() + "'");

    ExperimentConfig cfg;
    using detail::json_get;
    if (j.contains("experiment")) {
        cfg.kind = detail::parse_kind(json_get<std::string>(j, "experiment", "run"));
        cfg.kind_explicit = true;
    }

    auto& radio = cfg.scenario.radio;
    radio.carrier_frequency_hz = json_get(j, "carrier_frequency_hz", radio.carrier_frequency_hz);
    radio.bandwidth_hz = json_get(j, "bandwidth_hz", radio.bandwidth_hz);
    radio.tx_power_dbm = json_get(j, "tx_power_dbm", radio.tx_power_dbm);
    radio.noise_power_dbm = json_get(j, "noise_power_dbm", radio.noise_power_dbm);
    radio.cell_radius_m = json_get(j, "cell_radius_m", radio.cell_radius_m);
    radio.pulse_time_s = json_get(j, "pulse_time_s", radio.pulse_time_s);
    radio.repetition_factor = json_get(j, "repetition_factor", radio.repetition_factor);
    radio.time_bandwidth_product =
        json_get(j, "time_bandwidth_product", radio.time_bandwidth_product);
    radio.false_alarm_target = json_get(j, "false_alarm_target", radio.false_alarm_target);

    cfg.scenario.num_vues = json_get(j, "num_vues", cfg.scenario.num_vues);
    cfg.scenario.bs_elements = json_get(j, "bs_elements", cfg.scenario.bs_elements);
    cfg.scenario.ris_elements = json_get(j, "ris_elements", cfg.scenario.ris_elements);
    cfg.scenario.clutter.density_per_m2 =
        json_get(j, "clutter_density_per_m2", cfg.scenario.clutter.density_per_m2);
    cfg.scenario.clutter.mean_reflectivity_dbm2 =
        json_get(j, "clutter_reflectivity_dbm2", cfg.scenario.clutter.mean_reflectivity_dbm2);
    cfg.scenario.clutter.reflectivity_std_db =
        json_get(j, "clutter_reflectivity_std_db", cfg.scenario.clutter.reflectivity_std_db);
    cfg.scenario.incidence_psi_max_rad =
        json_get(j, "incidence_psi_max_deg", 60.0) * kPi / 180.0;
    cfg.scenario.max_speed_mps = json_get(j, "max_speed_mps", cfg.scenario.max_speed_mps);
    cfg.scenario.min_range_m = json_get(j, "min_range_m", cfg.scenario.min_range_m);
    if (j.contains("code_length"))
        cfg.scenario.code_length = json_get<int>(j, "code_length", 0);
    if (j.contains("fixed_vue_positions")) {
        const auto& arr = j.at("fixed_vue_positions");
        if (!arr.is_array()) throw ConfigError("fixed_vue_positions must be an array");
        std::vector<PolarPosition> pos;
        for (const auto& e : arr) {
            if (!e.is_object() || !e.contains("range_m") || !e.contains("azimuth_deg"))
                throw ConfigError("fixed_vue_positions entries need range_m and azimuth_deg");
            PolarPosition p;
            p.range_m = e.at("range_m").get<double>();
            p.azimuth_rad = e.at("azimuth_deg").get<double>() * kPi / 180.0;
            pos.push_back(p);
        }
        cfg.scenario.fixed_vue_positions = std::move(pos);
    }

    if (j.contains("idle_mode"))
        cfg.signaling.idle_mode =
            detail::parse_idle_mode(json_get<std::string>(j, "idle_mode", ""));
    if (j.contains("leakage_db") && !j.at("leakage_db").is_null()) {
        const double leak_db = json_get(j, "leakage_db", 0.0);
        if (leak_db > 0.0) throw ConfigError("leakage_db must be <= 0");
        cfg.signaling.leakage_power_ratio = db_to_linear(leak_db);
    }
    if (j.contains("decoder_radius")) {
        const auto s = json_get<std::string>(j, "decoder_radius", "standard");
        if (s == "standard")
            cfg.decoder.radius = DecoderSettings::Radius::Standard;
        else if (s == "conservative")
            cfg.decoder.radius = DecoderSettings::Radius::Conservative;
        else
            throw ConfigError("decoder_radius must be standard or conservative");
    }

    cfg.bs_elements_sweep = json_get(j, "bs_elements_sweep", cfg.bs_elements_sweep);
    cfg.density_sweep = json_get(j, "density_sweep", cfg.density_sweep);
    cfg.beta_c_db_list = json_get(j, "beta_c_db_list", cfg.beta_c_db_list);
    cfg.sigma_gps_m = json_get(j, "sigma_gps_m", cfg.sigma_gps_m);
    cfg.p_fa_grid = json_get(j, "p_fa_grid", cfg.p_fa_grid);
    cfg.include_no_clutter = json_get(j, "include_no_clutter", cfg.include_no_clutter);
    cfg.p_cd_target = json_get(j, "p_cd_target", cfg.p_cd_target);
    cfg.ris_side_max = json_get(j, "ris_side_max", cfg.ris_side_max);
    cfg.trials = json_get(j, "trials", cfg.trials);
    cfg.drops = json_get(j, "drops", cfg.drops);
    cfg.seed = json_get(j, "seed", cfg.seed);

    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// Fully resolved view of a config, defaults included. nlohmann objects keep
// keys sorted, so the dump is canonical and stable across runs.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = to_string(cfg.kind);
    const auto& radio = cfg.scenario.radio;
    j["carrier_frequency_hz"] = radio.carrier_frequency_hz;
    j["bandwidth_hz"] = radio.bandwidth_hz;
    j["tx_power_dbm"] = radio.tx_power_dbm;
    j["noise_power_dbm"] = radio.noise_power_dbm;
    j["cell_radius_m"] = radio.cell_radius_m;
    j["pulse_time_s"] = radio.pulse_time_s;
    j["repetition_factor"] = radio.repetition_factor;
    j["time_bandwidth_product"] = radio.time_bandwidth_product;
    j["false_alarm_target"] = radio.false_alarm_target;
    j["num_vues"] = cfg.scenario.num_vues;
    j["bs_elements"] = cfg.scenario.bs_elements;
    j["ris_elements"] = cfg.scenario.ris_elements;
    j["clutter_density_per_m2"] = cfg.scenario.clutter.density_per_m2;
    j["clutter_reflectivity_dbm2"] = cfg.scenario.clutter.mean_reflectivity_dbm2;
    j["clutter_reflectivity_std_db"] = cfg.scenario.clutter.reflectivity_std_db;
    j["incidence_psi_max_deg"] = cfg.scenario.incidence_psi_max_rad * 180.0 / kPi;
    j["max_speed_mps"] = cfg.scenario.max_speed_mps;
    j["min_range_m"] = cfg.scenario.min_range_m;
    if (cfg.scenario.code_length) j["code_length"] = *cfg.scenario.code_length;
    if (cfg.scenario.fixed_vue_positions) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : *cfg.scenario.fixed_vue_positions)
            arr.push_back({{"range_m", p.range_m}, {"azimuth_deg", p.azimuth_rad * 180.0 / kPi}});
        j["fixed_vue_positions"] = std::move(arr);
    }
    j["idle_mode"] = to_string(cfg.signaling.idle_mode);
    j["leakage_power_ratio"] = cfg.signaling.leakage_power_ratio;
    j["decoder_radius"] =
        cfg.decoder.radius == DecoderSettings::Radius::Standard ? "standard" : "conservative";
    j["bs_elements_sweep"] = cfg.bs_elements_sweep;
    j["density_sweep"] = cfg.density_sweep;
    j["beta_c_db_list"] = cfg.beta_c_db_list;
    j["sigma_gps_m"] = cfg.sigma_gps_m;
    j["p_fa_grid"] = cfg.p_fa_grid;
    j["include_no_clutter"] = cfg.include_no_clutter;
    j["p_cd_target"] = cfg.p_cd_target;
    j["ris_side_max"] = cfg.ris_side_max;
    j["trials"] = cfg.trials;
    j["drops"] = cfg.drops;
    j["seed"] = cfg.seed;
    return j;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string config_hash(const ExperimentConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(dump);
    return os.str();
}

} // namespace t2u
