// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include "svdb/frozen.hpp"
#include "svdb/vec.hpp"

namespace svdb {

enum class SampleMode {
    nearest,
    trilinear,
};

namespace detail {

// Lattice coordinates are clamped to a range well inside int32 before the
// cast; any clamped read lands outside every node and yields the background,
// which is the right answer for positions that far out.
inline int lattice_coord(double v)
{
    double f = std::floor(v);
    if (f < -1.0e9)
        return -1000000000;
    if (f > 1.0e9)
        return 1000000000;
    return int(f);
}

} // namespace detail

/// Reconstruction over any lattice reader `float reader(Coord)`. Voxel
/// centers sit at integer coordinates; positions with no voxel data resolve
/// to the reader's background.
template <typename Reader>
inline float sample_nearest(const Reader& reader, const Vec3d& p)
{
    return reader(Coord{detail::lattice_coord(p.x + 0.5), detail::lattice_coord(p.y + 0.5),
                        detail::lattice_coord(p.z + 0.5)});
}

template <typename Reader>
inline float sample_trilinear(const Reader& reader, const Vec3d& p)
{
    int x0 = detail::lattice_coord(p.x);
    int y0 = detail::lattice_coord(p.y);
    int z0 = detail::lattice_coord(p.z);
    double wx = p.x - std::floor(p.x);
    double wy = p.y - std::floor(p.y);
    double wz = p.z - std::floor(p.z);

    double v000 = reader(Coord{x0, y0, z0});
    double v100 = reader(Coord{x0 + 1, y0, z0});
    double v010 = reader(Coord{x0, y0 + 1, z0});
    double v110 = reader(Coord{x0 + 1, y0 + 1, z0});
    double v001 = reader(Coord{x0, y0, z0 + 1});
    double v101 = reader(Coord{x0 + 1, y0, z0 + 1});
    double v011 = reader(Coord{x0, y0 + 1, z0 + 1});
    double v111 = reader(Coord{x0 + 1, y0 + 1, z0 + 1});

    double v00 = v000 * (1.0 - wx) + v100 * wx;
    double v10 = v010 * (1.0 - wx) + v110 * wx;
    double v01 = v001 * (1.0 - wx) + v101 * wx;
    double v11 = v011 * (1.0 - wx) + v111 * wx;
    double v0 = v00 * (1.0 - wy) + v10 * wy;
    double v1 = v01 * (1.0 - wy) + v11 * wy;
    return float(v0 * (1.0 - wz) + v1 * wz);
}

template <typename Reader>
inline float sample_field(const Reader& reader, const Vec3d& p, SampleMode mode)
{
    return mode == SampleMode::nearest ? sample_nearest(reader, p) : sample_trilinear(reader, p);
}

/// Central differences of the trilinear reconstruction, half-voxel step.
template <typename Reader>
inline Vec3d sample_gradient(const Reader& reader, const Vec3d& p)
{
    constexpr double h = 0.5;
    double gx = (sample_trilinear(reader, Vec3d{p.x + h, p.y, p.z})
                 - sample_trilinear(reader, Vec3d{p.x - h, p.y, p.z}))
                / (2.0 * h);
    double gy = (sample_trilinear(reader, Vec3d{p.x, p.y + h, p.z})
                 - sample_trilinear(reader, Vec3d{p.x, p.y - h, p.z}))
                / (2.0 * h);
    double gz = (sample_trilinear(reader, Vec3d{p.x, p.y, p.z + h})
                 - sample_trilinear(reader, Vec3d{p.x, p.y, p.z - h}))
                / (2.0 * h);
    return {gx, gy, gz};
}

inline float sample(const Accessor& acc, const Vec3d& p, SampleMode mode)
{
    return sample_field(acc, p, mode);
}

inline Vec3d gradient(const Accessor& acc, const Vec3d& p)
{
    return sample_gradient(acc, p);
}

} // namespace svdb
