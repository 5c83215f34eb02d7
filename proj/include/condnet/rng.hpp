#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace condnet {

/// Seeded pseudo-random source with a fixed, platform-independent draw sequence.
///
/// Algorithm:
///   - engine: std::mt19937_64 seeded with the 64-bit seed (the standard pins
///     its output sequence exactly);
///   - uniform01(): (next_u64() >> 11) * 2^-53, a double in [0, 1);
///   - below(n): rejection sampling, draws x until x < 2^64 - (2^64 mod n),
///     returns x mod n;
///   - shuffle(): Fisher-Yates from the back, swapping i with below(i + 1);
///   - stream(seed, k): engine seeded with splitmix64(seed + k * 0x9E3779B97F4A7C15).
///
/// The standard library distributions are deliberately not used because their
/// output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Independent sub-stream `index` derived from `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(seed + index * 0x9E3779B97F4A7C15ULL));
    }

    static constexpr std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // (2^64 - n) mod n == 2^64 mod n; zero means every draw is acceptable.
        const std::uint64_t rem = (0 - n) % n;
        const std::uint64_t limit = 0 - rem;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (rem == 0 || x < limit) return x % n;
        }
    }

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace condnet
