#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace nkma {

/// Seedable randomness source. Wraps std::mt19937_64 but derives all
/// variates (uniform reals, bounded ints, normals) through fixed
/// algorithms instead of the standard distributions, whose output is
/// implementation-defined. Streams are therefore reproducible across
/// compilers and platforms for a given seed.
class Rng {
public:
    static constexpr const char* kAlgorithmName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw from [0, 1) with 53 bits of precision.
    double unit_real() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::size_t index(std::size_t bound) {
        const std::uint64_t b = bound;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % b);
    }

    bool coin_flip() { return (engine_() & 1u) != 0; }

    /// Standard normal via Box-Muller (one value per call; the pair's
    /// second half is cached).
    double standard_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = unit_real();
        } while (u1 <= 0.0);
        u2 = unit_real();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    /// Derives an independent child seed; used to split one master seed
    /// into per-trial / per-component streams.
    std::uint64_t split() { return mix(engine_()); }

    /// SplitMix64 finalizer. Pure function, used for seed derivation.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nkma
