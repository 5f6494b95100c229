#pragma once

#include <cstdint>

#include "rpl/vec.hpp"

namespace rpl {

// splitmix64: tiny, seedable, and bit-reproducible across platforms, which
// std::uniform_real_distribution is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    Vec2 unit_vec2() {
        const double a = uniform(0.0, 6.283185307179586476925286766559);
        return {std::cos(a), std::sin(a)};
    }

private:
    std::uint64_t state_;
};

} // namespace rpl
