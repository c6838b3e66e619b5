#pragma once

// Fully specified 64-bit PRNG (splitmix64-seeded xoshiro256**) so that every
// seeded operation in the library is reproducible bit-for-bit across builds
// and platforms.  Algorithms follow the public-domain reference code by
// Blackman and Vigna (prng.di.unimi.it).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "alcore/errors.hpp"

namespace alcore {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// k-th output (0-based) of the splitmix64 stream seeded with `seed`.
// Used to derive decorrelated sub-streams from one master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t state = seed;
    std::uint64_t out = detail::splitmix64_next(state);
    for (std::uint64_t i = 0; i < k; ++i) out = detail::splitmix64_next(state);
    return out;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : has_spare_(false), spare_(0.0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64_next(sm);
    }

    // xoshiro256** core step.
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n).  Rejection keeps the draw exact.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw argument_error("Rng::below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::uint64_t state_[4];
    bool has_spare_;
    double spare_;
};

}  // namespace alcore
