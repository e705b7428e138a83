#pragma once

// Pinned pseudo-random generators. Every seeded operation in the project
// (split shuffles, pseudo-embeddings, MLP initialisation, fixtures) draws from
// SplitMix64 so results are reproducible across platforms and languages:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Bounded integers use rejection sampling on the top of the 64-bit range,
// uniform doubles take the high 53 bits, normals use the Box-Muller cosine
// branch only (one normal per two uniforms).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace credigraph {

class SplitMix64 {
   public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound). bound must be > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % bound;
    }

    // Uniform double in [0, 1).
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    [[nodiscard]] constexpr std::uint64_t state() const noexcept { return state_; }

   private:
    std::uint64_t state_;
};

// Finalizer used to derive independent sub-seeds (seed, stream) -> seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 g(seed ^ (stream * 0xD1B54A32D192ED03ULL));
    g.next();
    return g.next();
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xCBF29CE484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Fisher-Yates, iterating from the back.
template <class T>
void seeded_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace credigraph
