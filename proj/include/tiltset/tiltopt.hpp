// Offline tilt-angle optimization: PSO over the inclusion-count objective,
// certification of full RFS inclusion, and grid-table generation with
// symmetry completion.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tiltset/forceset.hpp"
#include "tiltset/platform.hpp"

namespace tiltset::tiltopt {

struct PsoConfig {
    int particles = 40;
    int iterations = 120;
    double inertia = 0.729;      // standard constriction coefficients
    double cognitive = 1.49445;
    double social = 1.49445;
    std::uint64_t seed = 1;
};

struct OptimConfig {
    double gamma_max = M_PI_4;
    double epsilon = 1e-6;
    PsoConfig pso;
    double rfs_half_width = 1.0;  // N
    int threads = 0;              // 0 = hardware concurrency

    void validate() const;
};

/// The two-term objective: -(vertices included) + ||gamma||^2 / (N gmax^2 + eps).
/// The penalty term is < 1 for any gamma in the box, so an objective below
/// -(N_R) + 1 certifies full inclusion.
double objective(const platform::PlatformParams& params,
                 const platform::TiltVector& gamma,
                 const forceset::RfsSpec& rfs, const OptimConfig& cfg);

struct OptimizeResult {
    platform::TiltVector gamma;
    double objective = 0.0;
    bool certified = false;
    int included = 0;
};

/// PSO global best over the box [-gamma_max, gamma_max]^N. Deterministic
/// for a fixed seed. Never throws on failure to certify; the flag reports it.
OptimizeResult optimize(const platform::PlatformParams& params,
                        const forceset::RfsSpec& rfs, const OptimConfig& cfg);

/// As `optimize` but with per-component box [lo, hi] and warm-start
/// candidates injected into the initial swarm. Used by the table builder to
/// keep neighbouring cells in the same solution branch.
OptimizeResult optimize_boxed(const platform::PlatformParams& params,
                              const forceset::RfsSpec& rfs,
                              const OptimConfig& cfg,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi,
                              const std::vector<platform::TiltVector>& seeds);

/// Grid of RFS centers over the nonnegative quadrant; both axes must start
/// at zero so the table completes symmetrically to the full signed range.
struct GridSpec {
    double x_max = 1.0;
    double x_step = 0.1;
    double y_max = 1.0;
    double y_step = 0.1;
};

struct TiltTableEntry {
    platform::TiltVector gamma;
    double objective = 0.0;
    bool certified = false;
};

/// Optimized tilt angles indexed by RFS center (x, y); the z center is
/// fixed at the platform weight. Entries are stored row-major over
/// (ix, iy) with both axes covering the full signed range.
class TiltTable {
public:
    std::vector<double> axis_x;
    std::vector<double> axis_y;
    double center_z = 0.0;
    double gamma_max = 0.0;
    double epsilon = 0.0;
    double half_width = 0.0;
    int n_vertices = 0;
    std::uint64_t params_hash = 0;
    std::vector<TiltTableEntry> entries;

    const TiltTableEntry& at(int ix, int iy) const {
        return entries[static_cast<std::size_t>(ix) * axis_y.size() + iy];
    }
    TiltTableEntry& at(int ix, int iy) {
        return entries[static_cast<std::size_t>(ix) * axis_y.size() + iy];
    }

    bool all_certified() const;
    int certified_count() const;
    double max_abs_gamma() const;

    /// Bicubic Catmull-Rom interpolation of each joint angle at force
    /// center (fx, fy). Queries are clamped to the table range; the
    /// interpolant reproduces the stored values at grid nodes.
    platform::TiltVector interpolate(double fx, double fy) const;

    double range_x() const { return axis_x.empty() ? 0.0 : axis_x.back(); }
    double range_y() const { return axis_y.empty() ? 0.0 : axis_y.back(); }

    /// Versioned JSON persistence; doubles round-trip bit-exactly.
    void save(const std::filesystem::path& path) const;
    static TiltTable load(const std::filesystem::path& path);
};

/// Optimizes every cell of the quadrant grid (warm-starting each cell from
/// its already-solved neighbours), then fills the remaining quadrants via
/// the platform's mirror symmetries. Every completed entry is re-certified
/// by direct membership counting; cells that fail re-verification are
/// re-optimized from scratch.
TiltTable build_table(const platform::PlatformParams& params,
                      const GridSpec& grid, const OptimConfig& cfg);

}  // namespace tiltset::tiltopt
