#pragma once

#include <cmath>
#include <cstdint>

namespace sgi {

/// Counter-based RNG: value = hash(seed, stream, counter). Drawing the n-th
/// variate never depends on execution order, so parallel shot loops and
/// re-runs produce byte-identical results for the same seed.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull))) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-1, 1].
    double uniform_pm1() { return 2.0 * uniform() - 1.0; }

    /// Standard normal via Box-Muller (no state caching, stays counter-pure).
    double gaussian() {
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t next() {
        const std::uint64_t c = counter_++;
        return mix(key_ + c * 0x9e3779b97f4a7c15ull);
    }

    std::uint64_t counter() const { return counter_; }

    /// splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace sgi
