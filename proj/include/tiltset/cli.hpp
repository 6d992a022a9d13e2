// Command implementations behind the tiltset executable. Each returns the
// process exit code: 0 ok, 1 check failed, 2 bad config/arguments,
// 3 uncertified table cells, 4 missing file or range violation,
// 5 persistent allocation infeasibility.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "tiltset/config.hpp"
#include "tiltset/tiltopt.hpp"

namespace tiltset::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUncertified = 3;
inline constexpr int kExitMissingOrRange = 4;
inline constexpr int kExitInfeasible = 5;

/// "zero" or a comma-separated list of n radians values.
platform::TiltVector parse_gamma(const std::string& text, int n_uavs);

/// "x0:x1:step,y0:y1:step" with x0 = y0 = 0.
tiltopt::GridSpec parse_grid(const std::string& text);

/// Reports hoverability at the given tilt configuration: membership of the
/// equilibrium force, its normalized L-inf value, and rank of the stacked
/// force/torque map.
int cmd_hover_check(const config::Config& cfg,
                    const std::optional<platform::TiltVector>& gamma,
                    std::ostream& out);

/// Writes support points of the HFS along a Fibonacci-sphere direction set
/// as CSV (dx,dy,dz,fx,fy,fz).
int cmd_hfs_export(const config::Config& cfg,
                   const std::optional<platform::TiltVector>& gamma,
                   int n_directions, const std::filesystem::path& out_path,
                   std::ostream& out);

/// Builds the tilt table over the quadrant grid and persists it.
int cmd_build_table(const config::Config& cfg, const tiltopt::GridSpec& grid,
                    const std::filesystem::path& out_path,
                    bool allow_uncertified, std::ostream& out);

/// Runs the closed-loop scenario against a persisted table and writes the
/// log CSV plus a summary.
int cmd_simulate(const config::Config& cfg,
                 const std::filesystem::path& table_path,
                 const std::filesystem::path& out_path, std::ostream& out);

}  // namespace tiltset::cli
