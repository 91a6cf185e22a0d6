#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace lame::cli {

using json = nlohmann::json;

/// Config or argument validation failure; maps to exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

/// Global options shared by the subcommands; CLI flags override config fields.
struct run_options {
    std::filesystem::path out = "out";
    int jobs = 1;
    int k_max = -1;       // -1: use config/default
    int trunc = -1;
    double tol = -1.0;
    bool slow = false;    // k_max 110, truncation 300
};

int cmd_series(const json& cfg, const run_options& opt);
int cmd_radius(const json& cfg, const run_options& opt);
int cmd_scan(const json& cfg, const run_options& opt);
int cmd_continue(const json& cfg, const run_options& opt);
int cmd_wp_eval(const json& cfg, const run_options& opt);
int cmd_reproduce(const json& cfg, const run_options& opt);

/// Full argv dispatch; returns the process exit code.
int dispatch(int argc, const char* const* argv);

}
