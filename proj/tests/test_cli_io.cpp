#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "t2u/experiment.hpp"
#include "t2u/results.hpp"

using namespace t2u;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

// Scratch directory removed when the guard goes out of scope.
struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("t2u_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("empty config resolves to the documented defaults") {
    const auto cfg = config_from_json(nlohmann::json::object());

    CHECK(cfg.kind == ExperimentKind::SingleRun);
    CHECK_FALSE(cfg.kind_explicit);
    CHECK(cfg.scenario.radio.carrier_frequency_hz == 70e9);
    CHECK(cfg.scenario.radio.bandwidth_hz == 61e6);
    CHECK(cfg.scenario.radio.tx_power_dbm == 20.0);
    CHECK(cfg.scenario.radio.noise_power_dbm == -82.0);
    CHECK(cfg.scenario.radio.cell_radius_m == 100.0);
    CHECK(cfg.scenario.radio.pulse_time_s == 10e-6);
    CHECK(cfg.scenario.radio.repetition_factor == 4);
    CHECK(cfg.scenario.radio.time_bandwidth_product == 512.0);
    CHECK(cfg.scenario.radio.false_alarm_target == 0.05);
    CHECK(cfg.scenario.num_vues == 16);
    CHECK(cfg.scenario.bs_elements == 64);
    CHECK(cfg.scenario.ris_elements == 94 * 94);
    CHECK_FALSE(cfg.scenario.code_length.has_value());
    CHECK(cfg.signaling.idle_mode == RisMode::RandomScatter);
    CHECK(cfg.signaling.leakage_power_ratio == 0.0);
    CHECK(cfg.decoder.radius == DecoderSettings::Radius::Standard);
    CHECK(cfg.trials == 1000);
    CHECK(cfg.drops == 500);
    CHECK(cfg.seed == 1);

    // An unnamed experiment defaults to 16 VUEs, which code out on 32 rows.
    const auto scn = build_scenario(cfg.scenario, 1);
    CHECK(scn.code_length == 32);
}

TEST_CASE("unknown and ill-typed config keys are rejected") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"num_veus", 4}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"experiment", "roc"}, {"extra", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"trials", "many"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"bandwidth_hz", nullptr}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"bs_elements_sweep", 16}}), ConfigError);

    // Values that type-check but violate the validated ranges.
    CHECK_THROWS_AS(config_from_json({{"trials", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"drops", -3}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"p_cd_target", 1.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"ris_side_max", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"p_fa_grid", {0.1, 1.5}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"density_sweep", nlohmann::json::array()}}),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json({{"sigma_gps_m", {-1.0}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"ris_elements", 60}}), ConfigError);
}

TEST_CASE("experiment names map onto kinds") {
    CHECK(config_from_json({{"experiment", "roc"}}).kind == ExperimentKind::Roc);
    CHECK(config_from_json({{"experiment", "ris_size"}}).kind == ExperimentKind::RisSize);
    CHECK(config_from_json({{"experiment", "ris-size"}}).kind == ExperimentKind::RisSize);
    CHECK(config_from_json({{"experiment", "pca"}}).kind == ExperimentKind::Pca);
    CHECK(config_from_json({{"experiment", "run"}}).kind == ExperimentKind::SingleRun);
    CHECK(config_from_json({{"experiment", "run"}}).kind_explicit);
    CHECK_THROWS_AS(config_from_json({{"experiment", "sweep"}}), ConfigError);
}

TEST_CASE("signaling and decoder fields parse from their wire forms") {
    auto cfg = config_from_json({{"leakage_db", -20.0},
                                 {"idle_mode", "specular"},
                                 {"decoder_radius", "conservative"}});
    CHECK(cfg.signaling.leakage_power_ratio == Approx(0.01).epsilon(1e-12));
    CHECK(cfg.signaling.idle_mode == RisMode::Specular);
    CHECK(cfg.decoder.radius == DecoderSettings::Radius::Conservative);

    cfg = config_from_json({{"leakage_db", nullptr}, {"idle_mode", "off"}});
    CHECK(cfg.signaling.leakage_power_ratio == 0.0);
    CHECK(cfg.signaling.idle_mode == RisMode::Off);

    CHECK_THROWS_AS(config_from_json({{"leakage_db", 3.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"idle_mode", "mirror"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"decoder_radius", "loose"}}), ConfigError);
}

TEST_CASE("angles and fixed positions convert from degrees") {
    const auto cfg = config_from_json(
        {{"num_vues", 2},
         {"incidence_psi_max_deg", 45.0},
         {"fixed_vue_positions",
          {{{"range_m", 80.0}, {"azimuth_deg", 90.0}},
           {{"range_m", 40.0}, {"azimuth_deg", -30.0}}}}});
    CHECK(cfg.scenario.incidence_psi_max_rad == Approx(kPi / 4.0).epsilon(1e-12));
    REQUIRE(cfg.scenario.fixed_vue_positions.has_value());
    REQUIRE(cfg.scenario.fixed_vue_positions->size() == 2);
    CHECK((*cfg.scenario.fixed_vue_positions)[0].range_m == 80.0);
    CHECK((*cfg.scenario.fixed_vue_positions)[0].azimuth_rad ==
          Approx(kPi / 2.0).epsilon(1e-12));
    CHECK((*cfg.scenario.fixed_vue_positions)[1].azimuth_rad ==
          Approx(-kPi / 6.0).epsilon(1e-12));

    CHECK_THROWS_AS(config_from_json({{"fixed_vue_positions", 3}}), ConfigError);
    CHECK_THROWS_AS(
        config_from_json({{"num_vues", 1},
                          {"fixed_vue_positions", {{{"range_m", 10.0}}}}}),
        ConfigError);
    // Count mismatch with num_vues is caught by validation.
    CHECK_THROWS_AS(
        config_from_json({{"num_vues", 3},
                          {"fixed_vue_positions",
                           {{{"range_m", 10.0}, {"azimuth_deg", 0.0}}}}}),
        ConfigError);
}

TEST_CASE("config hash is canonical and value sensitive") {
    const auto a = config_from_json({{"seed", 7}, {"trials", 50}});
    const auto b = config_from_json({{"trials", 50}, {"seed", 7}});

    const std::string ha = config_hash(a);
    CHECK(ha == config_hash(b));
    CHECK(ha.size() == 16);
    for (const char c : ha) CHECK(std::isxdigit(static_cast<unsigned char>(c)));

    auto c = a;
    c.seed = 8;
    CHECK(config_hash(c) != ha);
    c = a;
    c.scenario.bs_elements = 32;
    CHECK(config_hash(c) != ha);

    // The resolved view carries every field, including defaulted ones.
    const auto j = config_to_json(a);
    CHECK(j.at("experiment") == "run");
    CHECK(j.at("carrier_frequency_hz") == 70e9);
    CHECK(j.at("idle_mode") == "random_scatter");
    CHECK(j.at("decoder_radius") == "standard");
    CHECK(j.at("trials") == 50);
    CHECK_FALSE(j.contains("code_length"));
}

TEST_CASE("config files parse with filesystem errors surfaced") {
    TempDir tmp;
    const auto good = tmp.path / "good.json";
    std::ofstream(good) << R"({"experiment": "roc", "drops": 12})";
    const auto cfg = parse_config_file(good.string());
    CHECK(cfg.kind == ExperimentKind::Roc);
    CHECK(cfg.drops == 12);

    CHECK_THROWS_AS(parse_config_file((tmp.path / "absent.json").string()), IoError);
    const auto bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{not json";
    CHECK_THROWS_AS(parse_config_file(bad.string()), ConfigError);
}

TEST_CASE("doubles print in shortest round-trip form") {
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(-3.5) == "-3.5");
    CHECK(format_double(1e-17) == "1e-17");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("result records survive a CSV round trip") {
    std::vector<ResultRecord> records;
    records.push_back({"pca", "bs_elements=64,method=ris,rho=0.1", "pca", 0.05,
                       1e-17, 1000, 42, "00ff00ff00ff00ff"});
    records.push_back({"roc", "beta_c_db=-10,p_fa=0.05,rho=0.2", "p_cd", -3.5,
                       0.0, 500, 1, "deadbeefdeadbeef"});
    records.push_back({"run", R"(vue="odd",kind)", "snr_db", 12.25, 0.5, 10, 3, "0"});

    std::ostringstream os;
    write_results_csv(records, os);
    const std::string text = os.str();

    // Fields holding commas or quotes are quoted; plain ones are not.
    CHECK(text.find("\"bs_elements=64,method=ris,rho=0.1\"") != std::string::npos);
    CHECK(text.find("\"vue=\"\"odd\"\",kind\"") != std::string::npos);
    CHECK(text.find("deadbeefdeadbeef") != std::string::npos);

    std::istringstream is(text);
    const auto back = read_results_csv(is);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(back[i] == records[i]);
}

TEST_CASE("malformed result CSV inputs raise io errors") {
    const auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_results_csv(is);
    };
    CHECK_THROWS_AS(parse(""), IoError);
    CHECK_THROWS_AS(parse("experiment,sweep\n"), IoError);
    const std::string head = std::string(kResultCsvHeader) + "\n";
    CHECK_THROWS_AS(parse(head + "roc,s,m,0.1,0,5,1\n"), IoError);
    CHECK_THROWS_AS(parse(head + "roc,s,m,abc,0,5,1,h\n"), IoError);
    CHECK_THROWS_AS(parse(head + "roc,s,m,0.1,0,-5,1,h\n"), IoError);
    CHECK(parse(head).empty());
}

TEST_CASE("named formats parse and unknown ones are rejected") {
    CHECK(parse_format("csv") == OutputFormat::Csv);
    CHECK(parse_format("json") == OutputFormat::Json);
    CHECK_THROWS_AS(parse_format("yaml"), ConfigError);
}

TEST_CASE("result files come with a matching metadata sidecar") {
    TempDir tmp;
    const auto cfg = config_from_json({{"experiment", "pca"}, {"seed", 9}});
    std::vector<ResultRecord> records;
    records.push_back(
        {"pca", "bs_elements=16,method=ris,rho=0.1", "pca", 0.75, 0.02, 100, 9,
         config_hash(cfg)});

    const auto csv_path = tmp.path / "out.csv";
    write_results(records, csv_path.string(), OutputFormat::Csv, cfg);

    std::ifstream csv_in(csv_path);
    const auto back = read_results_csv(csv_in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == records[0]);

    const auto meta = nlohmann::json::parse(slurp(tmp.path / "out.csv.meta.json"));
    CHECK(meta.at("config_hash") == config_hash(cfg));
    CHECK(meta.at("config") == config_to_json(cfg));
    CHECK(meta.at("tool") == "t2usim");

    const auto json_path = tmp.path / "out.json";
    write_results(records, json_path.string(), OutputFormat::Json, cfg);
    const auto arr = nlohmann::json::parse(slurp(json_path));
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 1);
    CHECK(arr[0].at("metric") == "pca");
    CHECK(arr[0].at("value") == 0.75);
    CHECK(arr[0].at("trials") == 100);

    CHECK_THROWS_AS(
        write_results(records, (tmp.path / "no_dir" / "x.csv").string(),
                      OutputFormat::Csv, cfg),
        IoError);
}

TEST_CASE("experiment runs are deterministic and fully labeled") {
    auto base = nlohmann::json{{"num_vues", 2},
                               {"bs_elements", 8},
                               {"ris_elements", 64},
                               {"clutter_density_per_m2", 0.001},
                               {"trials", 6},
                               {"drops", 4},
                               {"seed", 5}};

    base["experiment"] = "run";
    const auto run_cfg = config_from_json(base);
    const auto once = run_experiment(run_cfg);
    const auto again = run_experiment(run_cfg);
    REQUIRE_FALSE(once.empty());
    REQUIRE(once.size() == again.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i] == again[i]);
    for (const auto& r : once) {
        CHECK(r.experiment == "run");
        CHECK(r.seed == 5);
        CHECK(r.config_hash == config_hash(run_cfg));
    }
    // Overall association plus a per-VUE breakdown.
    CHECK(once[0].sweep == "vue=all");
    CHECK(once[0].metric == "pca");

    base["experiment"] = "roc";
    base["p_fa_grid"] = {0.05, 0.2};
    base["density_sweep"] = {0.001};
    base["beta_c_db_list"] = {-10.0};
    const auto roc = run_experiment(config_from_json(base));
    REQUIRE(roc.size() == 2);
    CHECK(roc[0].experiment == "roc");
    CHECK(roc[0].sweep == "beta_c_db=-10,p_fa=0.05,rho=0.001");
    CHECK(roc[0].metric == "p_cd");
    CHECK(roc[1].sweep == "beta_c_db=-10,p_fa=0.2,rho=0.001");
    CHECK(roc[0].value >= 0.0);
    CHECK(roc[0].value <= 1.0);
}
