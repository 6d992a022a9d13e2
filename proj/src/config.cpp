#include "tiltset/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace tiltset::config {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(path + ": expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (ok.find(key) == ok.end()) {
            throw ConfigError(path + ": unknown key '" + key + "'");
        }
    }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(path + "." + key + ": expected a number");
    }
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key,
            int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(path + "." + key + ": expected an integer");
    }
    return v.get<int>();
}

std::vector<double> get_vec(const json& obj, const std::string& path,
                            const char* key, std::vector<double> fallback,
                            std::size_t size) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != size) {
        throw ConfigError(path + "." + key + ": expected an array of " +
                          std::to_string(size) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw ConfigError(path + "." + key + ": expected numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

control::PidGains get_pid(const json& obj, const std::string& path,
                          const char* key, control::PidGains fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    const std::string p = path + "." + key;
    check_keys(v, p, {"p", "i", "d"});
    control::PidGains g = fallback;
    g.p = get_num(v, p, "p", g.p);
    g.i = get_num(v, p, "i", g.i);
    g.d = get_num(v, p, "d", g.d);
    return g;
}

void parse_platform(const json& obj, platform::PlatformParams& p) {
    const std::string path = "platform";
    check_keys(obj, path,
               {"n_uavs", "mass", "inertia_diag", "joint_inertia",
                "arm_length", "arm_angle", "rotor_offset", "drag_ratio",
                "u_max", "gravity"});
    p.n_uavs = get_int(obj, path, "n_uavs", p.n_uavs);
    const auto n = static_cast<std::size_t>(p.n_uavs);
    p.mass = get_num(obj, path, "mass", p.mass);
    const auto inertia =
        get_vec(obj, path, "inertia_diag", {0.05, 0.05, 0.05}, 3);
    p.inertia = geom::Vec3(inertia[0], inertia[1], inertia[2]).asDiagonal();
    // Per-UAV arrays default to the reference platform replicated n times.
    p.joint_inertia = get_vec(obj, path, "joint_inertia",
                              std::vector<double>(n, 0.005), n);
    p.arm_length =
        get_vec(obj, path, "arm_length", std::vector<double>(n, 0.22), n);
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) angles[i] = i * M_PI_2;
    p.arm_angle = get_vec(obj, path, "arm_angle", angles, n);
    p.rotor_offset = get_num(obj, path, "rotor_offset", p.rotor_offset);
    p.drag_ratio = get_num(obj, path, "drag_ratio", p.drag_ratio);
    p.u_max = get_num(obj, path, "u_max", p.u_max);
    p.gravity = get_num(obj, path, "gravity", p.gravity);
}

void parse_optimizer(const json& obj, tiltopt::OptimConfig& o) {
    const std::string path = "optimizer";
    check_keys(obj, path,
               {"gamma_max", "epsilon", "rfs_half_width", "threads", "pso"});
    o.gamma_max = get_num(obj, path, "gamma_max", o.gamma_max);
    o.epsilon = get_num(obj, path, "epsilon", o.epsilon);
    o.rfs_half_width = get_num(obj, path, "rfs_half_width", o.rfs_half_width);
    o.threads = get_int(obj, path, "threads", o.threads);
    if (obj.contains("pso")) {
        const auto& pso = obj.at("pso");
        const std::string p = path + ".pso";
        check_keys(pso, p,
                   {"particles", "iterations", "inertia", "cognitive",
                    "social", "seed"});
        o.pso.particles = get_int(pso, p, "particles", o.pso.particles);
        o.pso.iterations = get_int(pso, p, "iterations", o.pso.iterations);
        o.pso.inertia = get_num(pso, p, "inertia", o.pso.inertia);
        o.pso.cognitive = get_num(pso, p, "cognitive", o.pso.cognitive);
        o.pso.social = get_num(pso, p, "social", o.pso.social);
        if (pso.contains("seed")) {
            if (!pso.at("seed").is_number_unsigned() &&
                !pso.at("seed").is_number_integer()) {
                throw ConfigError(p + ".seed: expected an integer");
            }
            o.pso.seed = pso.at("seed").get<std::uint64_t>();
        }
    }
}

void parse_controller(const json& obj, control::ControllerConfig& c) {
    const std::string path = "controller";
    check_keys(obj, path,
               {"pid_translation", "pid_rotation", "pid_tilt",
                "lpf_time_constant", "dt", "force_ref_clamp"});
    c.translation = get_pid(obj, path, "pid_translation", c.translation);
    c.rotation = get_pid(obj, path, "pid_rotation", c.rotation);
    c.tilt = get_pid(obj, path, "pid_tilt", c.tilt);
    c.lpf_time_constant =
        get_num(obj, path, "lpf_time_constant", c.lpf_time_constant);
    c.dt = get_num(obj, path, "dt", c.dt);
    c.force_ref_clamp = get_num(obj, path, "force_ref_clamp", c.force_ref_clamp);
}

void parse_scenario(const json& obj, ScenarioConfig& s) {
    const std::string path = "scenario";
    check_keys(obj, path,
               {"trajectory", "duration", "dt", "wind", "x_distance",
                "y_amplitude"});
    if (obj.contains("trajectory")) {
        const auto& v = obj.at("trajectory");
        if (!v.is_string()) {
            throw ConfigError("scenario.trajectory: expected a string");
        }
        s.trajectory = v.get<std::string>();
        if (s.trajectory != "arc" && s.trajectory != "hover") {
            throw ConfigError("scenario.trajectory: must be 'arc' or 'hover'");
        }
    }
    s.duration = get_num(obj, path, "duration", s.duration);
    s.dt = get_num(obj, path, "dt", s.dt);
    s.trajectory_params.x_distance =
        get_num(obj, path, "x_distance", s.trajectory_params.x_distance);
    s.trajectory_params.y_amplitude =
        get_num(obj, path, "y_amplitude", s.trajectory_params.y_amplitude);
    if (obj.contains("wind")) {
        const auto& w = obj.at("wind");
        const std::string p = "scenario.wind";
        check_keys(w, p, {"force", "x_range"});
        const auto f = get_vec(w, p, "force", {0.0, 0.5, 0.0}, 3);
        s.zone.force = geom::Vec3(f[0], f[1], f[2]);
        const auto r = get_vec(w, p, "x_range", {1.0, 4.0}, 2);
        s.zone.x_min = r[0];
        s.zone.x_max = r[1];
        if (!(s.zone.x_min < s.zone.x_max)) {
            throw ConfigError(p + ".x_range: need x_min < x_max");
        }
    }
}

}  // namespace

Config from_json(const nlohmann::json& doc) {
    Config cfg;
    check_keys(doc, "config",
               {"platform", "optimizer", "controller", "scenario"});
    if (doc.contains("platform")) parse_platform(doc.at("platform"), cfg.platform);
    if (doc.contains("optimizer")) parse_optimizer(doc.at("optimizer"), cfg.optimizer);
    if (doc.contains("controller")) parse_controller(doc.at("controller"), cfg.controller);
    if (doc.contains("scenario")) parse_scenario(doc.at("scenario"), cfg.scenario);
    try {
        cfg.platform.validate();
        cfg.optimizer.validate();
        cfg.controller.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.scenario.duration > 0) || !(cfg.scenario.dt > 0)) {
        throw ConfigError("scenario: duration and dt must be positive");
    }
    return cfg;
}

Config load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path.string() + ": " +
                          e.what());
    }
    return from_json(doc);
}

}  // namespace tiltset::config
