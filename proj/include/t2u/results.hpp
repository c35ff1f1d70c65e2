#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "t2u/config.hpp"
#include "t2u/errors.hpp"
#include "t2u/version.hpp"

namespace t2u {

// One scalar result of an experiment sweep point. `sweep` is a canonical
// "key=value,key=value" string with keys in alphabetical order.
struct ResultRecord {
    std::string experiment;
    std::string sweep;
    std::string metric;
    double value = 0.0;
    double ci_half_width = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string config_hash;

    bool operator==(const ResultRecord&) const = default;
};

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("format must be csv or json");
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Splits one CSV line honoring double-quoted fields.
inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(std::string("bad numeric field for ") + what + ": '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64_field(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(std::string("bad integer field for ") + what + ": '" + s + "'");
    return v;
}

} // namespace detail

inline constexpr const char* kResultCsvHeader =
    "experiment,sweep,metric,value,ci_half_width,trials,seed,config_hash";

inline void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& os) {
    os << kResultCsvHeader << "\n";
    for (const auto& r : records) {
        os << detail::csv_quote(r.experiment) << ',' << detail::csv_quote(r.sweep) << ','
           << detail::csv_quote(r.metric) << ',' << format_double(r.value) << ','
           << format_double(r.ci_half_width) << ',' << r.trials << ',' << r.seed << ','
           << detail::csv_quote(r.config_hash) << "\n";
    }
}

inline std::vector<ResultRecord> read_results_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("results CSV is empty");
    if (line != kResultCsvHeader) throw IoError("unexpected results CSV header: " + line);
    std::vector<ResultRecord> records;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::csv_split(line);
        if (f.size() != 8) throw IoError("results CSV row needs 8 fields");
        ResultRecord r;
        r.experiment = f[0];
        r.sweep = f[1];
        r.metric = f[2];
        r.value = detail::parse_double_field(f[3], "value");
        r.ci_half_width = detail::parse_double_field(f[4], "ci_half_width");
        r.trials = detail::parse_u64_field(f[5], "trials");
        r.seed = detail::parse_u64_field(f[6], "seed");
        r.config_hash = f[7];
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_results_json(const std::vector<ResultRecord>& records, std::ostream& os) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"experiment", r.experiment},
                       {"sweep", r.sweep},
                       {"metric", r.metric},
                       {"value", r.value},
                       {"ci_half_width", r.ci_half_width},
                       {"trials", r.trials},
                       {"seed", r.seed},
                       {"config_hash", r.config_hash}});
    }
    os << arr.dump(2) << "\n";
}

// Writes the records plus a <path>.meta.json sidecar carrying the fully
// resolved configuration. Outputs contain nothing run-dependent beyond the
// seeded results, so a rerun with the same config is byte-identical.
inline void write_results(const std::vector<ResultRecord>& records, const std::string& path,
                          OutputFormat format, const ExperimentConfig& cfg) {
    {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot open output file '" + path + "'");
        if (format == OutputFormat::Csv)
            write_results_csv(records, os);
        else
            write_results_json(records, os);
        if (!os) throw IoError("failed writing output file '" + path + "'");
    }
    nlohmann::json meta;
    meta["config"] = config_to_json(cfg);
    meta["config_hash"] = config_hash(cfg);
    meta["tool"] = kToolName;
    meta["tool_version"] = kVersion;
    const std::string meta_path = path + ".meta.json";
    std::ofstream ms(meta_path, std::ios::binary);
    if (!ms) throw IoError("cannot open meta file '" + meta_path + "'");
    ms << meta.dump(2) << "\n";
    if (!ms) throw IoError("failed writing meta file '" + meta_path + "'");
}

} // namespace t2u
