#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace precflex {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Root of all randomness in a run. Child seeds are derived from the root
/// seed and a purpose tag, so adding a new consumer never perturbs the
/// streams of existing ones.
class SeedTree {
public:
    explicit SeedTree(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    SeedTree split(std::string_view tag) const noexcept {
        // FNV-1a over the tag, mixed with the parent seed.
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : tag) {
            h = (h ^ c) * 0x100000001B3ull;
        }
        return SeedTree(splitmix64(seed_ ^ splitmix64(h)));
    }

private:
    std::uint64_t seed_;
};

/// 64-bit Mersenne Twister with distribution code that does not depend on the
/// standard library implementation.
class Rng {
public:
    explicit Rng(const SeedTree& seed) : engine_(seed.seed()) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

private:
    std::mt19937_64 engine_;
};

}  // namespace precflex
