// tiltset: force-set shaping and closed-loop simulation for a hinged
// multi-UAV payload platform.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tiltset/cli.hpp"

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  hover check negative\n"
    "  2  bad config file or arguments\n"
    "  3  uncertified table cells (without --allow-uncertified)\n"
    "  4  missing file or force range outside the table\n"
    "  5  persistent allocation infeasibility\n";

tiltset::config::Config load_config(const std::string& path) {
    if (path.empty()) {
        return tiltset::config::Config{};  // built-in reference defaults
    }
    return tiltset::config::load(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "tiltset: shapes the feasible force set of a hinged multi-UAV "
        "payload platform by optimizing tilt angles, and flies the shaped "
        "set through a redundancy-exploiting cascaded controller."};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (optional)");

    std::string gamma_text = "zero";
    std::string out_path = "out.csv";
    std::string table_path = "tilt_table.json";
    std::string grid_text = "0:1:0.1,0:1:0.1";
    int directions = 200;
    bool allow_uncertified = false;
    std::optional<std::uint64_t> seed;

    app.fallthrough();

    auto* hover = app.add_subcommand(
        "hover-check", "Check hoverability at a tilt configuration");
    hover->add_option("--gamma", gamma_text,
                      "'zero' or comma-separated joint angles [rad]");

    auto* hfs = app.add_subcommand(
        "hfs-export", "Export HFS support points for plotting");
    hfs->add_option("--gamma", gamma_text,
                    "'zero' or comma-separated joint angles [rad]");
    hfs->add_option("--directions", directions, "number of directions (>= 6)");
    hfs->add_option("--out", out_path, "output CSV path");

    auto* build = app.add_subcommand(
        "build-table", "Optimize tilt angles over the RFS-center grid");
    build->add_option("--grid", grid_text,
                      "quadrant grid 'x0:x1:step,y0:y1:step' (x0 = y0 = 0)");
    build->add_option("--out", table_path, "output table path");
    build->add_option("--seed", seed, "override optimizer RNG seed");
    build->add_flag("--allow-uncertified", allow_uncertified,
                    "exit 0 even when cells fail certification");

    auto* simulate = app.add_subcommand(
        "simulate", "Run the closed-loop scenario against a tilt table");
    simulate->add_option("--table", table_path, "tilt table path");
    simulate->add_option("--out", out_path, "output log CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = load_config(config_path);
        if (seed.has_value()) {
            cfg.optimizer.pso.seed = *seed;
        }
        std::optional<tiltset::platform::TiltVector> gamma;
        if (gamma_text != "zero") {
            gamma = tiltset::cli::parse_gamma(gamma_text, cfg.platform.n_uavs);
        }
        if (hover->parsed()) {
            return tiltset::cli::cmd_hover_check(cfg, gamma, std::cout);
        }
        if (hfs->parsed()) {
            return tiltset::cli::cmd_hfs_export(cfg, gamma, directions,
                                                out_path, std::cout);
        }
        if (build->parsed()) {
            return tiltset::cli::cmd_build_table(
                cfg, tiltset::cli::parse_grid(grid_text), table_path,
                allow_uncertified, std::cout);
        }
        if (simulate->parsed()) {
            return tiltset::cli::cmd_simulate(cfg, table_path, out_path,
                                              std::cout);
        }
    } catch (const tiltset::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return tiltset::cli::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tiltset::cli::kExitConfig;
    }
    return tiltset::cli::kExitOk;
}
