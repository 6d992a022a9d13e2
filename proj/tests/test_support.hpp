// Shared test fixtures and helpers.

#pragma once

#include <random>

#include "tiltset/platform.hpp"
#include "tiltset/tiltopt.hpp"

namespace tiltset::test {

inline platform::PlatformParams reference_params() {
    return platform::PlatformParams{};
}

/// Uniform double in [lo, hi) from a seeded engine (explicit mapping, not
/// std::uniform_real_distribution, so sequences are reproducible anywhere).
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) *
                        (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
    }
    Eigen::VectorXd uniform_vec(int n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 engine_;
};

/// Small PSO settings for unit tests (the acceptance suite runs defaults).
inline tiltopt::OptimConfig fast_optim_config(std::uint64_t seed = 1) {
    tiltopt::OptimConfig cfg;
    cfg.pso.particles = 16;
    cfg.pso.iterations = 40;
    cfg.pso.seed = seed;
    return cfg;
}

/// One tiny certified table shared by controller/sim tests: quadrant grid
/// {0, 0.5} x {0, 0.5} completed to 3x3 over {-0.5, 0, 0.5}.
inline const tiltopt::TiltTable& shared_test_table() {
    static const tiltopt::TiltTable table = [] {
        tiltopt::GridSpec grid{0.5, 0.5, 0.5, 0.5};
        return tiltopt::build_table(reference_params(), grid,
                                    fast_optim_config(7));
    }();
    return table;
}

}  // namespace tiltset::test
