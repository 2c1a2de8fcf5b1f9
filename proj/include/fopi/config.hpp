#pragma once

#include "fopi/experiment.hpp"

#include <filesystem>
#include <json.hpp>
#include <string>

namespace fopi {

/// Everything a command needs. sim.dt defaults to 0.01 s for GA-in-the-loop runs.
struct RunConfig {
    FracPI controller{2.0, 0.08, 1.0};  ///< used by `simulate`
    PredictorSplit split{1.0};          ///< used by `simulate` and `tune`
    SweepSpec sweep;                    ///< plant, GA, simulation and approximation settings
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "key = value" lines ('#' starts a comment). Unknown keys are errors.
RunConfig parse_config_text(const std::string& text);

/// Reads either a key/value file or a run manifest (JSON with a "config" object).
RunConfig load_config(const std::filesystem::path& path);

/// Sets one key as if it appeared in a config file.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

/// Canonical key/value rendering, parseable by parse_config_text.
std::string config_to_text(const RunConfig& cfg);

}  // namespace fopi
