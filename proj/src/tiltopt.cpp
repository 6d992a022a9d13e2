#include "tiltset/tiltopt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "detail/parallel.hpp"
#include "detail/rng.hpp"

namespace tiltset::tiltopt {

namespace {

using platform::TiltVector;
using json = nlohmann::ordered_json;

struct Evaluation {
    double objective;
    int included;
};

Evaluation evaluate(const platform::PlatformParams& params,
                    const TiltVector& gamma, const forceset::RfsSpec& rfs,
                    const OptimConfig& cfg) {
    const auto query = forceset::make_query(params, gamma);
    const int count = forceset::count_included(query, rfs);
    const int n_r = static_cast<int>(rfs.vertices.size());
    const double penalty =
        gamma.squaredNorm() /
        (params.n_uavs * cfg.gamma_max * cfg.gamma_max + cfg.epsilon);
    if (count < 0 || count > n_r) {
        throw std::logic_error("tiltopt: inclusion count out of range");
    }
    if (!(penalty >= 0.0) || !(penalty < 1.0)) {
        throw std::logic_error("tiltopt: penalty term escaped [0, 1)");
    }
    return {-count + penalty, count};
}

bool certifies(double objective_value, int n_vertices) {
    return objective_value < -static_cast<double>(n_vertices) + 1.0;
}

OptimizeResult run_pso(const platform::PlatformParams& params,
                       const forceset::RfsSpec& rfs, const OptimConfig& cfg,
                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       const std::vector<TiltVector>& seeds,
                       std::uint64_t rng_seed) {
    const int n = params.n_uavs;
    const int count = cfg.pso.particles;
    detail::Rng rng(rng_seed);

    std::vector<TiltVector> pos(count), vel(count), best_pos(count);
    std::vector<Evaluation> evals(count);
    Eigen::VectorXd best_val = Eigen::VectorXd::Zero(count);

    for (int p = 0; p < count; ++p) {
        pos[p].resize(n);
        if (p < static_cast<int>(seeds.size())) {
            pos[p] = seeds[p].cwiseMax(lo).cwiseMin(hi);
        } else {
            for (int d = 0; d < n; ++d) pos[p](d) = rng.uniform(lo(d), hi(d));
        }
        vel[p] = TiltVector::Zero(n);
    }

    const auto evaluate_all = [&] {
        detail::parallel_for(count, cfg.threads, [&](int p) {
            evals[p] = evaluate(params, pos[p], rfs, cfg);
        });
    };

    evaluate_all();
    int gbest = 0;
    for (int p = 0; p < count; ++p) {
        best_pos[p] = pos[p];
        best_val(p) = evals[p].objective;
        if (best_val(p) < best_val(gbest)) gbest = p;
    }
    TiltVector gbest_pos = best_pos[gbest];
    double gbest_val = best_val(gbest);
    int gbest_included = evals[gbest].included;

    const Eigen::VectorXd vel_cap = hi - lo;
    for (int it = 0; it < cfg.pso.iterations; ++it) {
        // All random draws happen sequentially so the result is independent
        // of the evaluation thread count.
        for (int p = 0; p < count; ++p) {
            for (int d = 0; d < n; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                vel[p](d) = cfg.pso.inertia * vel[p](d) +
                            cfg.pso.cognitive * r1 * (best_pos[p](d) - pos[p](d)) +
                            cfg.pso.social * r2 * (gbest_pos(d) - pos[p](d));
                vel[p](d) = std::clamp(vel[p](d), -vel_cap(d), vel_cap(d));
                pos[p](d) = std::clamp(pos[p](d) + vel[p](d), lo(d), hi(d));
            }
        }
        evaluate_all();
        for (int p = 0; p < count; ++p) {
            if (evals[p].objective < best_val(p)) {
                best_val(p) = evals[p].objective;
                best_pos[p] = pos[p];
                if (evals[p].objective < gbest_val) {
                    gbest_val = evals[p].objective;
                    gbest_pos = pos[p];
                    gbest_included = evals[p].included;
                }
            }
        }
    }

    OptimizeResult result;
    result.gamma = gbest_pos;
    result.objective = gbest_val;
    result.included = gbest_included;
    result.certified =
        certifies(gbest_val, static_cast<int>(rfs.vertices.size()));
    return result;
}

// Catmull-Rom through four knots, s in [0, 1] between p1 and p2.
double catmull_rom(double p0, double p1, double p2, double p3, double s) {
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * s +
                  (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * s * s * s);
}

struct AxisLookup {
    int stencil[4];
    double s;
};

AxisLookup axis_lookup(const std::vector<double>& axis, double x) {
    const int n = static_cast<int>(axis.size());
    AxisLookup out{{0, 0, 0, 0}, 0.0};
    if (n == 1) return out;
    x = std::clamp(x, axis.front(), axis.back());
    const double h = axis[1] - axis[0];
    int j = static_cast<int>(std::floor((x - axis.front()) / h));
    j = std::clamp(j, 0, n - 2);
    out.s = std::clamp((x - axis[j]) / h, 0.0, 1.0);
    out.stencil[0] = std::max(0, j - 1);
    out.stencil[1] = j;
    out.stencil[2] = j + 1;
    out.stencil[3] = std::min(n - 1, j + 2);
    return out;
}

void require_four_fold_layout(const platform::PlatformParams& params) {
    if (params.n_uavs != 4) {
        throw std::invalid_argument(
            "build_table: symmetry completion requires four UAVs");
    }
    for (int i = 0; i < 4; ++i) {
        if (std::abs(params.arm_angle[i] - i * M_PI_2) > 1e-12 ||
            params.arm_length[i] != params.arm_length[0] ||
            params.joint_inertia[i] != params.joint_inertia[0]) {
            throw std::invalid_argument(
                "build_table: symmetry completion requires the regular "
                "four-fold layout");
        }
    }
}

// Symmetry images of a quadrant-I solution. Mirror across the x-z plane
// swaps UAVs 2 and 4; mirror across the y-z plane swaps UAVs 1 and 3; the
// half-turn is their composition.
TiltVector mirror_x(const TiltVector& g) {
    TiltVector out(4);
    out << g(0), g(3), g(2), g(1);
    return out;
}
TiltVector mirror_y(const TiltVector& g) {
    TiltVector out(4);
    out << g(2), g(1), g(0), g(3);
    return out;
}
TiltVector half_turn(const TiltVector& g) {
    TiltVector out(4);
    out << g(2), g(3), g(0), g(1);
    return out;
}

std::vector<double> signed_axis(double x_max, double step, int positive_count) {
    std::vector<double> axis;
    for (int i = positive_count; i >= 1; --i) axis.push_back(-(i * step));
    axis.push_back(0.0);
    for (int i = 1; i <= positive_count; ++i) axis.push_back(i * step);
    (void)x_max;
    return axis;
}

int checked_count(double max_value, double step, const char* what) {
    if (!(step > 0) || max_value < 0) {
        throw std::invalid_argument(std::string("build_table: bad grid ") + what);
    }
    const int n = static_cast<int>(std::llround(max_value / step));
    if (std::abs(n * step - max_value) > 1e-9) {
        throw std::invalid_argument(
            std::string("build_table: step must divide the range for ") + what);
    }
    return n;
}

}  // namespace

void OptimConfig::validate() const {
    if (!(gamma_max > 0) || gamma_max > M_PI_2) {
        throw std::invalid_argument("optimizer: gamma_max must be in (0, pi/2]");
    }
    if (!(epsilon > 0)) {
        throw std::invalid_argument("optimizer: epsilon must be positive");
    }
    if (pso.particles < 1 || pso.iterations < 1) {
        throw std::invalid_argument(
            "optimizer: particle and iteration counts must be >= 1");
    }
    if (rfs_half_width < 0) {
        throw std::invalid_argument("optimizer: rfs_half_width must be >= 0");
    }
}

double objective(const platform::PlatformParams& params,
                 const platform::TiltVector& gamma,
                 const forceset::RfsSpec& rfs, const OptimConfig& cfg) {
    return evaluate(params, gamma, rfs, cfg).objective;
}

OptimizeResult optimize(const platform::PlatformParams& params,
                        const forceset::RfsSpec& rfs, const OptimConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd hi =
        Eigen::VectorXd::Constant(params.n_uavs, cfg.gamma_max);
    return run_pso(params, rfs, cfg, -hi, hi, {}, cfg.pso.seed);
}

OptimizeResult optimize_boxed(const platform::PlatformParams& params,
                              const forceset::RfsSpec& rfs,
                              const OptimConfig& cfg,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi,
                              const std::vector<platform::TiltVector>& seeds) {
    cfg.validate();
    return run_pso(params, rfs, cfg, lo, hi, seeds, cfg.pso.seed);
}

bool TiltTable::all_certified() const {
    return certified_count() == static_cast<int>(entries.size());
}

int TiltTable::certified_count() const {
    int n = 0;
    for (const auto& e : entries) n += e.certified ? 1 : 0;
    return n;
}

double TiltTable::max_abs_gamma() const {
    double m = 0.0;
    for (const auto& e : entries) {
        m = std::max(m, e.gamma.cwiseAbs().maxCoeff());
    }
    return m;
}

platform::TiltVector TiltTable::interpolate(double fx, double fy) const {
    if (entries.empty()) {
        throw std::logic_error("TiltTable::interpolate: empty table");
    }
    const auto lx = axis_lookup(axis_x, fx);
    const auto ly = axis_lookup(axis_y, fy);
    const int n = static_cast<int>(entries.front().gamma.size());
    platform::TiltVector out(n);
    for (int k = 0; k < n; ++k) {
        double col[4];
        for (int j = 0; j < 4; ++j) {
            col[j] = catmull_rom(at(lx.stencil[0], ly.stencil[j]).gamma(k),
                                 at(lx.stencil[1], ly.stencil[j]).gamma(k),
                                 at(lx.stencil[2], ly.stencil[j]).gamma(k),
                                 at(lx.stencil[3], ly.stencil[j]).gamma(k),
                                 lx.s);
        }
        out(k) = catmull_rom(col[0], col[1], col[2], col[3], ly.s);
    }
    return out;
}

void TiltTable::save(const std::filesystem::path& path) const {
    json doc;
    doc["format"] = "tiltset-table";
    doc["version"] = 1;
    char hash_hex[19];
    std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                  static_cast<unsigned long long>(params_hash));
    doc["params_hash"] = hash_hex;
    doc["center_z"] = center_z;
    doc["gamma_max"] = gamma_max;
    doc["epsilon"] = epsilon;
    doc["half_width"] = half_width;
    doc["n_vertices"] = n_vertices;
    doc["axis_x"] = axis_x;
    doc["axis_y"] = axis_y;
    doc["entries"] = json::array();
    for (const auto& e : entries) {
        json je;
        je["gamma"] = std::vector<double>(e.gamma.data(),
                                          e.gamma.data() + e.gamma.size());
        je["objective"] = e.objective;
        je["certified"] = e.certified;
        doc["entries"].push_back(std::move(je));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("TiltTable::save: cannot open " +
                                 path.string());
    }
    out << doc.dump(1) << '\n';
}

TiltTable TiltTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("TiltTable::load: cannot open " +
                                 path.string());
    }
    const json doc = json::parse(in);
    if (doc.value("format", "") != std::string("tiltset-table") ||
        doc.value("version", 0) != 1) {
        throw std::runtime_error("TiltTable::load: unrecognized format");
    }
    TiltTable t;
    t.params_hash =
        std::stoull(doc.at("params_hash").get<std::string>(), nullptr, 16);
    t.center_z = doc.at("center_z").get<double>();
    t.gamma_max = doc.at("gamma_max").get<double>();
    t.epsilon = doc.at("epsilon").get<double>();
    t.half_width = doc.at("half_width").get<double>();
    t.n_vertices = doc.at("n_vertices").get<int>();
    t.axis_x = doc.at("axis_x").get<std::vector<double>>();
    t.axis_y = doc.at("axis_y").get<std::vector<double>>();
    for (const auto& je : doc.at("entries")) {
        TiltTableEntry e;
        const auto g = je.at("gamma").get<std::vector<double>>();
        e.gamma = Eigen::Map<const Eigen::VectorXd>(g.data(),
                                                    static_cast<long>(g.size()));
        e.objective = je.at("objective").get<double>();
        e.certified = je.at("certified").get<bool>();
        t.entries.push_back(std::move(e));
    }
    if (t.entries.size() != t.axis_x.size() * t.axis_y.size()) {
        throw std::runtime_error("TiltTable::load: entry count mismatch");
    }
    return t;
}

TiltTable build_table(const platform::PlatformParams& params,
                      const GridSpec& grid, const OptimConfig& cfg) {
    params.validate();
    cfg.validate();
    require_four_fold_layout(params);

    const int nx_pos = checked_count(grid.x_max, grid.x_step, "x");
    const int ny_pos = checked_count(grid.y_max, grid.y_step, "y");
    const double fz = params.weight();

    // Quadrant-I pass. Cells are solved in row-major order so each cell can
    // warm-start from its already-solved neighbours; the canonical sign
    // orthant keeps every cell in one solution branch, which the bicubic
    // lookup downstream depends on.
    Eigen::VectorXd lo(4), hi(4);
    lo << -cfg.gamma_max, 0, -cfg.gamma_max, 0;
    hi << 0, cfg.gamma_max, 0, cfg.gamma_max;
    TiltVector anchor(4);
    anchor << -0.3, 0.3, -0.3, 0.3;

    std::vector<OptimizeResult> quadrant(
        static_cast<std::size_t>(nx_pos + 1) * (ny_pos + 1));
    const auto qindex = [&](int ix, int iy) {
        return static_cast<std::size_t>(ix) * (ny_pos + 1) + iy;
    };
    for (int iy = 0; iy <= ny_pos; ++iy) {
        for (int ix = 0; ix <= nx_pos; ++ix) {
            const geom::Vec3 center(ix * grid.x_step, iy * grid.y_step, fz);
            std::vector<TiltVector> seeds = {anchor};
            if (ix > 0) seeds.push_back(quadrant[qindex(ix - 1, iy)].gamma);
            if (iy > 0) seeds.push_back(quadrant[qindex(ix, iy - 1)].gamma);
            OptimConfig cell_cfg = cfg;
            cell_cfg.pso.seed = detail::mix_seed(cfg.pso.seed, ix, iy);
            quadrant[qindex(ix, iy)] = optimize_boxed(
                params, forceset::RfsSpec::cuboid(center, cfg.rfs_half_width),
                cell_cfg, lo, hi, seeds);
        }
    }

    TiltTable table;
    table.axis_x = signed_axis(grid.x_max, grid.x_step, nx_pos);
    table.axis_y = signed_axis(grid.y_max, grid.y_step, ny_pos);
    table.center_z = fz;
    table.gamma_max = cfg.gamma_max;
    table.epsilon = cfg.epsilon;
    table.half_width = cfg.rfs_half_width;
    table.n_vertices =
        static_cast<int>(forceset::RfsSpec::cuboid(geom::Vec3::Zero(),
                                                   cfg.rfs_half_width)
                             .vertices.size());
    table.params_hash = params.content_hash();
    table.entries.resize(table.axis_x.size() * table.axis_y.size());

    for (std::size_t ix = 0; ix < table.axis_x.size(); ++ix) {
        for (std::size_t iy = 0; iy < table.axis_y.size(); ++iy) {
            const double cx = table.axis_x[ix];
            const double cy = table.axis_y[iy];
            TiltVector gamma;
            if (cx >= 0 && cy >= 0) {
                gamma = quadrant[qindex(static_cast<int>(std::llround(cx / grid.x_step)),
                                        static_cast<int>(std::llround(cy / grid.y_step)))]
                            .gamma;
            } else if (cx < 0 && cy >= 0) {
                gamma = mirror_y(
                    quadrant[qindex(static_cast<int>(std::llround(-cx / grid.x_step)),
                                    static_cast<int>(std::llround(cy / grid.y_step)))]
                        .gamma);
            } else if (cx >= 0 && cy < 0) {
                gamma = mirror_x(
                    quadrant[qindex(static_cast<int>(std::llround(cx / grid.x_step)),
                                    static_cast<int>(std::llround(-cy / grid.y_step)))]
                        .gamma);
            } else {
                gamma = half_turn(
                    quadrant[qindex(static_cast<int>(std::llround(-cx / grid.x_step)),
                                    static_cast<int>(std::llround(-cy / grid.y_step)))]
                        .gamma);
            }

            // No trust in the symmetry algebra: every entry is re-certified
            // by direct counting, and a failed cell is re-optimized.
            const geom::Vec3 center(cx, cy, fz);
            const auto rfs =
                forceset::RfsSpec::cuboid(center, cfg.rfs_half_width);
            Evaluation eval = evaluate(params, gamma, rfs, cfg);
            if (!certifies(eval.objective, table.n_vertices)) {
                OptimConfig cell_cfg = cfg;
                cell_cfg.pso.seed =
                    detail::mix_seed(cfg.pso.seed ^ 0xf00dULL, ix, iy);
                const Eigen::VectorXd full_hi =
                    Eigen::VectorXd::Constant(4, cfg.gamma_max);
                const auto redo = optimize_boxed(params, rfs, cell_cfg,
                                                 -full_hi, full_hi, {gamma});
                gamma = redo.gamma;
                eval = evaluate(params, gamma, rfs, cfg);
            }

            TiltTableEntry entry;
            entry.gamma = gamma;
            entry.objective = eval.objective;
            entry.certified = certifies(eval.objective, table.n_vertices);
            table.at(static_cast<int>(ix), static_cast<int>(iy)) = entry;
        }
    }
    return table;
}

}  // namespace tiltset::tiltopt
