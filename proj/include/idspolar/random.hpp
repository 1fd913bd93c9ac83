#pragma once

#include <cstdint>
#include <limits>

namespace idspolar {

/// Counter-based SplitMix64 stream.
///
/// Draw k (k = 1, 2, ...) is splitmix64_finalize(key + k * 0x9E3779B97F4A7C15).
/// Doubles take the top 53 bits; bounded integers use rejection on the low
/// end (threshold = 2^64 mod n) followed by modulo. Every experiment trial uses
/// its own stream keyed by seed XOR trial_index, so results do not depend on
/// scheduling order.
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed) noexcept : key_(seed) {}
    static RandomSource for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
        return RandomSource(seed ^ trial);
    }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return finalize(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }
    result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., n-1}; n must be positive.
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform on {lo, ..., hi}.
    int uniform_int(int lo, int hi) noexcept {
        return lo + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    std::uint8_t bit() noexcept { return static_cast<std::uint8_t>(next_u64() >> 63); }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    static std::uint64_t finalize(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace idspolar
