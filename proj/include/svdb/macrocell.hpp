// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "svdb/frozen.hpp"
#include "svdb/parallel.hpp"
#include "svdb/transfer.hpp"
#include "svdb/vec.hpp"

namespace svdb {

/// Uniform macrocell grid over the volume, 32 voxels per cell axis (one
/// brick). Each cell stores the exact scalar min/max of its voxels and, once
/// a transfer function is applied, the majorant extinction used by Woodcock
/// tracking.
///
/// The volume's world box is the convex hull of voxel centers,
/// [0, dims-1] per axis. Cell c spans world [32c, min(32(c+1), dim-1)] and
/// its voxel box is the same interval with *inclusive* integer bounds: the
/// one-voxel layer shared with the next cell belongs to both. Trilinear
/// samples taken at world positions inside a cell only touch lattice points
/// in that closed box, so per-cell ranges bound interpolated values as well
/// as raw voxels and the derived majorants are conservative.
struct MacrocellGrid {
    static constexpr int cell_dim = 32;

    Vec3i cells{0, 0, 0};
    Coord vol_dims{0, 0, 0};
    std::vector<float> cell_min;
    std::vector<float> cell_max;
    std::vector<float> majorant;
    std::vector<std::uint8_t> empty;

    std::size_t cell_index(const Vec3i& c) const
    {
        return std::size_t(c.x)
               + std::size_t(cells.x) * (std::size_t(c.y) + std::size_t(cells.y) * std::size_t(c.z));
    }

    std::size_t cell_count() const
    {
        return std::size_t(cells.x) * std::size_t(cells.y) * std::size_t(cells.z);
    }

    /// World box of the whole grid: [0, dims-1] per axis.
    Vec3d world_max() const
    {
        return {double(vol_dims.x - 1), double(vol_dims.y - 1), double(vol_dims.z - 1)};
    }

    /// Closed voxel bounds of one cell, including the shared boundary layer.
    Box3i cell_voxel_box_closed(const Vec3i& c) const
    {
        Coord lo{c.x * cell_dim, c.y * cell_dim, c.z * cell_dim};
        Coord hi{std::min((c.x + 1) * cell_dim, vol_dims.x - 1),
                 std::min((c.y + 1) * cell_dim, vol_dims.y - 1),
                 std::min((c.z + 1) * cell_dim, vol_dims.z - 1)};
        return {lo, hi + Coord{1, 1, 1}}; // half-open form of the closed box
    }

    static Vec3i cell_counts_for(Coord dims)
    {
        auto n = [](int d) { return std::max(1, (d - 1 + cell_dim - 1) / cell_dim); };
        return {n(dims.x), n(dims.y), n(dims.z)};
    }
};

/// Exact per-cell scalar ranges; inactive voxels contribute the background.
inline MacrocellGrid build_macrocells(const FrozenGrid& g)
{
    MacrocellGrid mc;
    mc.vol_dims = g.dims;
    mc.cells = MacrocellGrid::cell_counts_for(g.dims);
    std::size_t n = mc.cell_count();
    mc.cell_min.assign(n, 0.0f);
    mc.cell_max.assign(n, 0.0f);
    mc.majorant.assign(n, 0.0f);
    mc.empty.assign(n, 1);

    parallel_for(std::int64_t(n), [&](std::int64_t i) {
        Vec3i c{int(i % mc.cells.x), int((i / mc.cells.x) % mc.cells.y),
                int(i / (std::int64_t(mc.cells.x) * mc.cells.y))};
        Box3i box = mc.cell_voxel_box_closed(c);
        Accessor acc(g);
        float mn = std::numeric_limits<float>::infinity();
        float mx = -std::numeric_limits<float>::infinity();
        for (int z = box.lo.z; z < box.hi.z; ++z)
            for (int y = box.lo.y; y < box.hi.y; ++y)
                for (int x = box.lo.x; x < box.hi.x; ++x) {
                    float v = acc.read({x, y, z});
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                }
        mc.cell_min[std::size_t(i)] = mn;
        mc.cell_max[std::size_t(i)] = mx;
    });
    return mc;
}

/// Recomputes majorants from the stored ranges; call whenever the transfer
/// function changes. Cells whose majorant is zero are flagged empty and can
/// be skipped wholesale during traversal.
inline void update_majorants(MacrocellGrid& mc, const TransferFunction& tf)
{
    std::size_t n = mc.cell_count();
    for (std::size_t i = 0; i < n; ++i) {
        double maj = tf.max_extinction_in_range(mc.cell_min[i], mc.cell_max[i]);
        mc.majorant[i] = float(maj);
        mc.empty[i] = maj == 0.0 ? 1 : 0;
    }
}

} // namespace svdb
