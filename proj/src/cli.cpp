#include "tiltset/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tiltset/forceset.hpp"
#include "tiltset/sim.hpp"

namespace tiltset::cli {

namespace {

std::vector<geom::Vec3> fibonacci_sphere(int count) {
    // Evenly distributed directions; the golden-angle spiral.
    std::vector<geom::Vec3> dirs;
    dirs.reserve(count);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return dirs;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

platform::TiltVector default_or(const std::optional<platform::TiltVector>& g,
                                int n) {
    return g.has_value() ? *g : platform::TiltVector::Zero(n);
}

}  // namespace

platform::TiltVector parse_gamma(const std::string& text, int n_uavs) {
    if (text == "zero") {
        return platform::TiltVector::Zero(n_uavs);
    }
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) {
            throw config::ConfigError("--gamma: bad number '" + item + "'");
        }
        values.push_back(v);
    }
    if (static_cast<int>(values.size()) != n_uavs) {
        throw config::ConfigError("--gamma: expected " +
                                  std::to_string(n_uavs) + " values or 'zero'");
    }
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<long>(values.size()));
}

tiltopt::GridSpec parse_grid(const std::string& text) {
    const auto parse_axis = [](const std::string& axis, double& max,
                               double& step) {
        double lo = 0, hi = 0, st = 0;
        if (std::sscanf(axis.c_str(), "%lf:%lf:%lf", &lo, &hi, &st) != 3) {
            throw config::ConfigError("--grid: expected x0:x1:step,y0:y1:step");
        }
        if (lo != 0.0) {
            throw config::ConfigError(
                "--grid: axes must start at 0 (the table is completed to the "
                "signed range by symmetry)");
        }
        max = hi;
        step = st;
    };
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw config::ConfigError("--grid: expected x0:x1:step,y0:y1:step");
    }
    tiltopt::GridSpec grid;
    parse_axis(text.substr(0, comma), grid.x_max, grid.x_step);
    parse_axis(text.substr(comma + 1), grid.y_max, grid.y_step);
    return grid;
}

int cmd_hover_check(const config::Config& cfg,
                    const std::optional<platform::TiltVector>& gamma,
                    std::ostream& out) {
    const auto g = default_or(gamma, cfg.platform.n_uavs);
    const auto query = forceset::make_query(cfg.platform, g);
    const geom::Vec3 f_eq = platform::equilibrium_force(
        cfg.platform, geom::Mat3::Identity(), geom::Vec3::Zero());
    const auto res = forceset::membership(query, f_eq);

    geom::MatDyn stacked(6, query.maps.force.cols());
    stacked.topRows(3) = query.maps.force;
    stacked.bottomRows(3) = query.maps.torque;
    const int rank = geom::rank(stacked);

    out << "equilibrium force [N]: " << f_eq.transpose() << "\n";
    out << "membership linf:       " << fmt(res.linf) << "\n";
    out << "rank([M_f; M_tau]):    " << rank << "\n";
    out << "hoverable:             " << (res.included ? "yes" : "no") << "\n";
    return res.included ? kExitOk : kExitCheckFailed;
}

int cmd_hfs_export(const config::Config& cfg,
                   const std::optional<platform::TiltVector>& gamma,
                   int n_directions, const std::filesystem::path& out_path,
                   std::ostream& out) {
    if (n_directions < 6) {
        throw config::ConfigError("--directions: need at least 6");
    }
    const auto g = default_or(gamma, cfg.platform.n_uavs);
    const auto query = forceset::make_query(cfg.platform, g);
    const auto dirs = fibonacci_sphere(n_directions);
    const auto points = forceset::support_points(query, dirs);

    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        out << "error: cannot write " << out_path.string() << "\n";
        return kExitMissingOrRange;
    }
    file << "dx,dy,dz,fx,fy,fz\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        file << fmt(dirs[i].x()) << ',' << fmt(dirs[i].y()) << ','
             << fmt(dirs[i].z()) << ',' << fmt(points[i].x()) << ','
             << fmt(points[i].y()) << ',' << fmt(points[i].z()) << '\n';
    }
    out << "wrote " << points.size() << " support points to "
        << out_path.string() << "\n";
    return kExitOk;
}

int cmd_build_table(const config::Config& cfg, const tiltopt::GridSpec& grid,
                    const std::filesystem::path& out_path,
                    bool allow_uncertified, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto table = tiltopt::build_table(cfg.platform, grid, cfg.optimizer);
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    table.save(out_path);

    const int cells = static_cast<int>(table.entries.size());
    out << "cells:        " << cells << "\n";
    out << "certified:    " << table.certified_count() << "\n";
    out << "max |gamma*|: " << table.max_abs_gamma() * 180.0 / M_PI
        << " deg\n";
    out << "wall time:    " << elapsed << " s\n";
    out << "table:        " << out_path.string() << "\n";
    if (!table.all_certified() && !allow_uncertified) {
        out << "error: uncertified cells present\n";
        return kExitUncertified;
    }
    return kExitOk;
}

int cmd_simulate(const config::Config& cfg,
                 const std::filesystem::path& table_path,
                 const std::filesystem::path& out_path, std::ostream& out) {
    if (!std::filesystem::exists(table_path)) {
        out << "error: table file not found: " << table_path.string() << "\n";
        return kExitMissingOrRange;
    }
    tiltopt::TiltTable table;
    try {
        table = tiltopt::TiltTable::load(table_path);
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kExitMissingOrRange;
    }
    if (table.params_hash != cfg.platform.content_hash()) {
        out << "error: table " << table_path.string()
            << " was built for different platform parameters\n";
        return kExitMissingOrRange;
    }

    const auto kind = cfg.scenario.trajectory == "hover"
                          ? sim::TrajectoryKind::hover
                          : sim::TrajectoryKind::arc;
    const auto trajectory = sim::make_trajectory(
        kind, cfg.scenario.duration, cfg.scenario.trajectory_params);

    sim::SimLog log;
    try {
        log = sim::run(cfg.platform, cfg.controller, table, trajectory,
                       cfg.scenario.zone, cfg.scenario.dt,
                       cfg.scenario.duration);
    } catch (const sim::TableRangeError& e) {
        out << "error: " << e.what() << "\n";
        return kExitMissingOrRange;
    } catch (const sim::AllocationAbort& e) {
        out << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }

    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        out << "error: cannot write " << out_path.string() << "\n";
        return kExitMissingOrRange;
    }
    log.write_csv(file);

    out << "steps:                 " << log.records.size() << "\n";
    out << "max position error:    " << fmt(log.max_position_error) << " m\n";
    out << "max orientation error: "
        << fmt(log.max_orientation_error * 180.0 / M_PI) << " deg\n";
    out << "infeasible steps:      " << log.infeasible_steps << "\n";
    out << "log:                   " << out_path.string() << "\n";
    return kExitOk;
}

}  // namespace tiltset::cli
