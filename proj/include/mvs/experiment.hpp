#pragma once

#include <string>

#include <json.hpp>

namespace mvs {

enum ExitStatus { kExitOk = 0, kExitConfig = 2, kExitInvariant = 3, kExitNoConvergence = 4 };

/// Validated config with every default filled in. Unknown keys raise ConfigError.
nlohmann::json resolve_config(const nlohmann::json& raw);

struct RunOutput {
    int status = kExitOk;
    nlohmann::json report;
    std::string csv;
    std::string csv_name;
};

/// Runs the configured command. Config and invariant errors propagate as exceptions;
/// non-convergence sets status 4 only when `strict`.
RunOutput run_experiment(const nlohmann::json& resolved, bool strict);

/// Full-precision CSV number.
std::string csv_number(double v);

/// Machine-readable error record.
nlohmann::json error_record(int status, const std::string& kind, const std::string& message);

}  // namespace mvs
