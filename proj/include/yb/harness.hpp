#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "yb/tensor.hpp"

namespace yb {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    std::string path;
    ConfigError(std::string p, const std::string& what)
        : std::runtime_error(p.empty() ? what : p + ": " + what), path(std::move(p)) {}
};

struct RunConfig {
    std::string suite;
    json solution;                    // family descriptor (four-slot solutions)
    json rule;                        // bracket-rule descriptor
    json params = json::object();     // suite specific extras
    std::vector<std::string> identities;  // empty: everything the suite computes
    int samples = 200;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
    double pole_margin = 0.05;
    SampleBox box{};
    bool box_given = false;
    int workers = 1;
    std::string out;
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config(const json& j);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }
json to_json(const RunConfig& c);

struct RunReport {
    RunConfig config;
    std::vector<ResidualReport> results;
    json details = json::object();
    std::string error;  // classifier rejections and similar verdict-level failures
    bool pass = true;
    double wall_time = 0.0;
};

RunReport run_suite(const RunConfig& cfg);
json to_json(const RunReport& r);
RunReport report_from_json(const json& j);
// writes the report; "-" or empty means stdout
void emit_report(const RunReport& r, const std::string& path);

enum ExitCode { kPass = 0, kIdentityFailure = 1, kConfigError = 2, kNumericHazard = 3 };

json complex_json(cx z);
cx complex_from_json(const json& j, const std::string& path);

}  // namespace yb
