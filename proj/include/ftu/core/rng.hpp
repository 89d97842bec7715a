#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace ftu {

/// Deterministic splittable generator (SplitMix64 core). All distributions are
/// implemented here instead of via <random> so that streams are identical on
/// every standard library.
///
/// `split(label)` depends only on the construction seed and the label, never
/// on how many values were drawn, so workers can derive their streams in any
/// order.
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed = 0) noexcept : seed_(seed), state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const noexcept { return seed_; }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        // Rejection keeps the draw unbiased.
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller; one value per call, no cached spare.
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    SeededRng split(std::string_view label) const noexcept {
        // FNV-1a over the label bytes.
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : label) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return SeededRng(mix(seed_ ^ mix(h)));
    }

    SeededRng split(std::uint64_t index) const noexcept {
        return SeededRng(mix(seed_ ^ mix(index + 0x632BE59BD9B4E019ULL)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace ftu
