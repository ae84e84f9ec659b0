#pragma once

#include <cstdint>
#include <random>

namespace truncld {

/// Mix a master seed with an index into a new 64-bit seed (SplitMix64 finalizer).
/// split(master, i) is the only way worker streams are derived, so results depend
/// on (seed, index) and never on which thread ran the chunk.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// One independent random stream. Not thread-safe; give each worker its own.
class Stream {
public:
    explicit Stream(std::uint64_t seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        engine_.seed(seq);
    }

    static Stream split(std::uint64_t master, std::uint64_t index) {
        return Stream(split_seed(master, index));
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    double normal() { return normal_(engine_); }

    std::uint64_t bits() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace truncld
