#pragma once

#include <cstdint>

namespace bsl {

// SplitMix64 step; also used standalone as a mixing function.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~0ULL / bound);
        for (;;) {
            std::uint64_t x = next();
            if (x < limit) return x % bound;
        }
    }

    // Uniform in [lo, hi] inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

  private:
    std::uint64_t state_;
};

// Stream seed for work item i under master seed s.  Fixed mixing rule so a
// result is reproducible no matter how items are batched across workers:
//   seed_i = mix(s ^ mix(i))
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
    return splitmix64_mix(seed ^ splitmix64_mix(i));
}

} // namespace bsl
