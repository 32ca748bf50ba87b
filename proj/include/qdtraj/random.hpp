#pragma once

#include "qdtraj/se3.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <algorithm>
#include <numbers>
#include <random>

namespace qdtraj {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// 53-bit uniform double in [0, 1).
constexpr double to_unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Counter-based stream: draw i is mix64(key + (i + 1) * gamma), so any draw can be
/// recomputed from (key, i) alone.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : _key(key) {}

    /// Stream keyed by a pair of seeds.
    static CounterRng keyed(std::uint64_t global_seed, std::uint64_t stream_seed)
    {
        return CounterRng(mix64((global_seed ^ mix64(stream_seed + kGoldenGamma)) + kGoldenGamma));
    }

    std::uint64_t next() { return mix64(_key + (++_counter) * kGoldenGamma); }
    double uniform() { return to_unit_interval(next()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t counter() const { return _counter; }

private:
    std::uint64_t _key;
    std::uint64_t _counter = 0;
};

/// Sequential engine for the evolutionary loop. mt19937_64 output is fixed by the
/// standard; the conversions below avoid implementation-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : _engine(seed) {}

    std::uint64_t bits() { return _engine(); }
    double uniform() { return to_unit_interval(_engine()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Unbiased integer in [0, n).
    std::uint64_t index(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = _engine();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 _engine;
};

/// Uniform direction on the unit sphere (z-height and azimuth), two draws.
template <typename Gen>
Vec3 random_unit_vector(Gen& gen)
{
    const double z = 2.0 * gen.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * gen.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

/// Uniform rotation (Shoemake's subgroup algorithm), three draws.
template <typename Gen>
Quat random_unit_quaternion(Gen& gen)
{
    const double u1 = gen.uniform();
    const double u2 = 2.0 * std::numbers::pi * gen.uniform();
    const double u3 = 2.0 * std::numbers::pi * gen.uniform();
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    return Quat(a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)).normalized();
}

} // namespace qdtraj
