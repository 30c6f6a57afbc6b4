// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "svdb/rng.hpp"
#include "svdb/vec.hpp"
#include "svdb/volume.hpp"

namespace svdb {

/// Independent uniform(0,1) noise per voxel, hashed from (seed, linear
/// index): fully dense, no empty neighborhoods anywhere.
inline DenseVolume synth_noise(Coord dims, std::uint64_t seed)
{
    std::uint64_t n = DenseVolume::voxel_count(dims);
    std::vector<float> data(n);
    for (std::uint64_t i = 0; i < n; ++i)
        data[i] = to_unit_float(hash_counter(seed, i));
    return DenseVolume::from_data(dims, std::move(data));
}

/// Sum of `count` Gaussian bumps over an exactly-zero background. Bumps are
/// truncated at 3 sigma so most voxels stay 0 and the histogram mode is 0.
inline DenseVolume synth_blobs(Coord dims, std::uint64_t seed, int count = 8)
{
    std::uint64_t n = DenseVolume::voxel_count(dims);
    std::vector<float> data(n, 0.0f);
    Rng rng(seed ^ 0x626C6F62ULL);
    int min_dim = dims.min_component();
    for (int k = 0; k < count; ++k) {
        Vec3d c{(0.15 + 0.7 * rng.uniform()) * (dims.x - 1),
                (0.15 + 0.7 * rng.uniform()) * (dims.y - 1),
                (0.15 + 0.7 * rng.uniform()) * (dims.z - 1)};
        double sigma = std::max(2.0, (0.04 + 0.08 * rng.uniform()) * min_dim);
        double amp = 0.4 + 1.1 * rng.uniform();
        double r3 = 3.0 * sigma;
        Coord lo{std::max(0, int(std::ceil(c.x - r3))), std::max(0, int(std::ceil(c.y - r3))),
                 std::max(0, int(std::ceil(c.z - r3)))};
        Coord hi{std::min(dims.x - 1, int(std::floor(c.x + r3))),
                 std::min(dims.y - 1, int(std::floor(c.y + r3))),
                 std::min(dims.z - 1, int(std::floor(c.z + r3)))};
        for (int z = lo.z; z <= hi.z; ++z)
            for (int y = lo.y; y <= hi.y; ++y)
                for (int x = lo.x; x <= hi.x; ++x) {
                    double dx = x - c.x, dy = y - c.y, dz = z - c.z;
                    double r2 = dx * dx + dy * dy + dz * dz;
                    if (r2 > r3 * r3)
                        continue;
                    std::uint64_t idx = std::uint64_t(x)
                                        + std::uint64_t(dims.x)
                                              * (std::uint64_t(y) + std::uint64_t(dims.y) * std::uint64_t(z));
                    data[idx] += float(amp * std::exp(-r2 / (2.0 * sigma * sigma)));
                }
    }
    return DenseVolume::from_data(dims, std::move(data));
}

/// Linear ramp along x: v = x/(W-1), so the full-volume range is (0,1).
inline DenseVolume synth_ramp(Coord dims)
{
    std::uint64_t n = DenseVolume::voxel_count(dims);
    std::vector<float> data(n);
    std::uint64_t i = 0;
    for (int z = 0; z < dims.z; ++z)
        for (int y = 0; y < dims.y; ++y)
            for (int x = 0; x < dims.x; ++x)
                data[i++] = dims.x > 1 ? float(double(x) / double(dims.x - 1)) : 0.0f;
    return DenseVolume::from_data(dims, std::move(data));
}

/// Radial field 1 - |p - center|/R clamped to [0,1]; the 0.5 level set is a
/// sphere of radius R/2 around the volume center.
inline DenseVolume synth_sphere(Coord dims, double radius = 0.0)
{
    Vec3d c{0.5 * (dims.x - 1), 0.5 * (dims.y - 1), 0.5 * (dims.z - 1)};
    double r = radius > 0.0 ? radius : 0.45 * double(dims.min_component() - 1);
    std::uint64_t n = DenseVolume::voxel_count(dims);
    std::vector<float> data(n);
    std::uint64_t i = 0;
    for (int z = 0; z < dims.z; ++z)
        for (int y = 0; y < dims.y; ++y)
            for (int x = 0; x < dims.x; ++x) {
                double dx = x - c.x, dy = y - c.y, dz = z - c.z;
                double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                data[i++] = float(std::clamp(1.0 - d / r, 0.0, 1.0));
            }
    return DenseVolume::from_data(dims, std::move(data));
}

/// Writes the volume as a headerless little-endian f32 raw file.
inline void write_raw_f32(const DenseVolume& v, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        fail(Errc::io_error, "cannot open " + path.string() + " for writing");
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(v.data().data()),
             std::streamsize(v.data().size() * 4));
    if (!os)
        fail(Errc::io_error, "write failed for " + path.string());
}

} // namespace svdb
