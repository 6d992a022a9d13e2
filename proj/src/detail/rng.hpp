// Seeded RNG helpers with explicit uniform mapping so results do not depend
// on standard-library distribution internals.

#pragma once

#include <cstdint>
#include <random>

namespace tiltset::detail {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
    return mix_seed(seed ^ mix_seed(a + 0x655a4f2d) ^ mix_seed(b + 0x2545f491));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tiltset::detail
