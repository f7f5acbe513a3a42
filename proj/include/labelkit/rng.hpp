#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace labelkit {

namespace detail {

// splitmix64 finalizer: full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based random source: every draw is a pure function of
// (seed, stream, counter), so generation can be sharded by index and
// replayed exactly regardless of evaluation order or thread count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t z = detail::mix64(seed_ ^ 0x8f1bbcdcbfa53e0bULL);
        z = detail::mix64(z ^ stream);
        return detail::mix64(z ^ counter);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Modulo bias is negligible for the
    // bounds used here (bound << 2^64).
    std::uint64_t below(std::uint64_t stream, std::uint64_t counter, std::uint64_t bound) const {
        return bits(stream, counter) % bound;
    }

    // Standard normal via Box-Muller on two counter draws.
    double gaussian(std::uint64_t stream, std::uint64_t counter) const {
        double u1 = uniform(stream, counter * 2);
        double u2 = uniform(stream, counter * 2 + 1);
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

// FNV-1a 64-bit hash; used for feature hashing and config digests where a
// platform-independent, stable hash is required (std::hash is not).
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    return fnv1a64(s.data(), s.size());
}

}  // namespace labelkit
