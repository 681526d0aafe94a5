#pragma once

#include <string>

#include <json.hpp>

#include "basket/calibration.hpp"
#include "basket/harness.hpp"

namespace basket {

struct OutputConfig {
    std::string dir = ".";
    std::string prefix = "run";
    bool per_replicate = false;
};

// A fully resolved run configuration: every default filled in, every method
// normalized, ready for the harness. `effective` is the round-trippable echo.
struct RunConfig {
    ScenarioConfig scenario;
    CutoffCalib cutoff;
    PhiPriorCalib phi;
    OutputConfig output;
    nlohmann::json effective;
};

// Parses and validates a JSON config document. Unknown keys are rejected with
// the offending path; q0 >= q1 anywhere is a ConfigError.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& doc);

}  // namespace basket
