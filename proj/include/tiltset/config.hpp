// Structured JSON configuration. Every section is optional and defaults to
// the reference platform / controller setup; unknown keys are rejected.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "tiltset/control.hpp"
#include "tiltset/platform.hpp"
#include "tiltset/sim.hpp"
#include "tiltset/tiltopt.hpp"

namespace tiltset::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string trajectory = "arc";   // "arc" | "hover"
    double duration = 40.0;           // s
    double dt = 1e-3;                 // s
    sim::DisturbanceZone zone{geom::Vec3(0, 0.5, 0), 1.0, 4.0};
    sim::TrajectoryParams trajectory_params;
};

struct Config {
    platform::PlatformParams platform;
    tiltopt::OptimConfig optimizer;
    control::ControllerConfig controller;
    ScenarioConfig scenario;
};

/// Parses and validates; throws ConfigError naming the offending field.
Config from_json(const nlohmann::json& doc);

/// Loads a JSON config file. An empty object reproduces the defaults.
Config load(const std::filesystem::path& path);

}  // namespace tiltset::config
