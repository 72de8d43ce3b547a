#ifndef FRONTDOOR_RNG_HPP
#define FRONTDOOR_RNG_HPP

#include <cstdint>
#include <random>

namespace frontdoor {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for the index-th task under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }

// Uniform double in [0,1) with 53 random bits. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

// Standard normal via Marsaglia's polar method; no cached spare, so each
// call consumes a whole number of draws and streams stay reproducible.
double standard_normal(Rng& rng);

}  // namespace frontdoor

#endif  // FRONTDOOR_RNG_HPP
