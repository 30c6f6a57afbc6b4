// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace svdb {

/// splitmix64 finalizer. Used both as the mixing function of Rng and as a
/// stateless per-counter hash for reproducible procedural data.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stateless counter hash: same (seed, counter) always yields the same value.
inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t counter)
{
    return mix64(mix64(seed) ^ counter);
}

/// Maps a 64-bit word to a double in [0, 1).
inline double to_unit_double(std::uint64_t bits)
{
    return double(bits >> 11) * 0x1.0p-53;
}

inline float to_unit_float(std::uint64_t bits)
{
    return float(bits >> 40) * 0x1.0p-24f;
}

/// Counter-based generator (splitmix64). Streams are a pure function of the
/// seed, so identical seeds give identical sequences on every platform and
/// regardless of how work is scheduled across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

    /// Stream for one (pixel, sample) pair; independent of tile scheduling.
    static Rng for_pixel_sample(std::uint64_t seed, int px, int py, int sample)
    {
        std::uint64_t h = mix64(seed);
        h = mix64(h ^ (std::uint64_t(std::uint32_t(px)) << 32 | std::uint32_t(py)));
        h = mix64(h ^ std::uint64_t(std::uint32_t(sample)));
        return Rng(h);
    }

    std::uint64_t next_u64()
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return to_unit_double(next_u64()); }

private:
    std::uint64_t state_;
};

} // namespace svdb
