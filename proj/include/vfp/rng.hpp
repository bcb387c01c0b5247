#pragma once

// Counter-based random streams: every draw is a pure function of
// (seed, particle index, step index, substream), so particle loops are
// bit-identical for any thread count and any evaluation order.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vfp {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// uniform in (0,1); never returns 0 or 1
inline double u01(std::uint64_t h) {
    return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

struct CounterRng {
    std::uint64_t seed = 0;

    double uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
        return detail::u01(detail::counter_hash(seed, a, b, c));
    }

    // standard normal pair via Box-Muller
    void normal_pair(std::uint64_t a, std::uint64_t b, double& z0, double& z1) const {
        const double u1 = uniform(a, b, 0);
        const double u2 = uniform(a, b, 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }
};

} // namespace vfp
