#pragma once

#include <cstdint>
#include <cmath>

namespace olgan {

// Deterministic RNG with stream splitting. All sampling in the project goes
// through this so that a master seed reproduces every artifact byte for byte.
// Gaussian draws use Box-Muller (no cached spare) to keep the draw sequence
// a pure function of the call count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    // Independent stream derived from this RNG's seed and a tag.
    Rng derive(std::uint64_t tag) const {
        return Rng(splitmix(seed_mix_ ^ (tag * 0xbf58476d1ce4e5b9ull)));
    }

    std::uint64_t next_u64() {
        // xorshift* generator; full 64-bit period given nonzero state
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // Uniform on [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return next_u64() % n;
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        x = x ^ (x >> 31);
        return x ? x : 0x9e3779b97f4a7c15ull;
    }

    std::uint64_t state_;
    std::uint64_t seed_mix_ = state_;
};

}  // namespace olgan
