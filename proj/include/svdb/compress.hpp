// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/frozen.hpp"
#include "svdb/parallel.hpp"
#include "svdb/tree.hpp"
#include "svdb/vec.hpp"
#include "svdb/volume.hpp"

namespace svdb {

/// Volumes are budgeted in 32^3 bricks; each brick covers 64 tree leaves.
inline constexpr int kBrickDim = 32;

/// Point-in-range similarity of a brick's value range against the background
/// value. Larger score = less similar to background.
enum class Metric {
    closest,  // min(|lo-B|, |hi-B|)
    farthest, // max(|lo-B|, |hi-B|)
    median,   // |(lo+hi)/2 - B|
};

inline const char* to_string(Metric m)
{
    switch (m) {
        case Metric::closest: return "closest";
        case Metric::farthest: return "farthest";
        case Metric::median: return "median";
    }
    return "?";
}

inline bool metric_from_string(const std::string& s, Metric& out)
{
    if (s == "closest")
        out = Metric::closest;
    else if (s == "farthest")
        out = Metric::farthest;
    else if (s == "median")
        out = Metric::median;
    else
        return false;
    return true;
}

inline double similarity(float lo, float hi, float background, Metric metric)
{
    double dlo = std::abs(double(lo) - double(background));
    double dhi = std::abs(double(hi) - double(background));
    switch (metric) {
        case Metric::closest: return std::min(dlo, dhi);
        case Metric::farthest: return std::max(dlo, dhi);
        case Metric::median: return std::abs((double(lo) + double(hi)) * 0.5 - double(background));
    }
    return 0.0;
}

struct CompressionParams {
    double quality = 1.0;          // in [0,1]: fraction of bricks to activate
    Metric metric = Metric::median;
    int histogram_bins = 0;        // 0 = 256 for u8 sources, 1024 for f32
    bool activate_corners = true;  // pin the two extreme corner voxels
    // Debug switch: activate bricks most-similar-to-background first instead.
    // Inverts what quality means; only useful for inspecting the sort.
    bool most_similar_first = false;
};

struct BrickRecord {
    Coord brick_id;           // brick coordinates, not voxels
    Box3i box;                // voxel box clipped to the volume
    float lo = 0.0f;
    float hi = 0.0f;
    double score = 0.0;
    std::uint64_t linear_index = 0;
};

struct CompressionReport {
    float background = 0.0f;
    std::uint64_t num_bricks = 0;
    std::uint64_t bricks_activated = 0;
    std::uint64_t voxels_activated = 0;
    std::uint64_t frozen_bytes = 0;
    std::uint64_t dense_bytes = 0;
    double achieved_ratio = 0.0;
};

inline Coord brick_counts(Coord dims)
{
    auto up = [](int d) { return (d + kBrickDim - 1) / kBrickDim; };
    return {up(dims.x), up(dims.y), up(dims.z)};
}

inline Box3i brick_box(Coord brick_id, Coord dims)
{
    Coord lo = brick_id * kBrickDim;
    Coord hi = vmin(lo + Coord(kBrickDim), dims);
    return {lo, hi};
}

/// One record per brick, sorted by descending score. Ties keep bricks whose
/// range is exactly [B,B] last (they carry no information) and otherwise
/// break by ascending linear brick index, so the order is a total function
/// of the input.
inline std::vector<BrickRecord> build_brick_records(const DenseVolume& v, float background,
                                                    Metric metric)
{
    Coord nb = brick_counts(v.dims());
    std::uint64_t total = std::uint64_t(nb.x) * std::uint64_t(nb.y) * std::uint64_t(nb.z);
    std::vector<BrickRecord> records(total);

    parallel_for(std::int64_t(total), [&](std::int64_t i) {
        int bx = int(i % nb.x);
        int by = int((i / nb.x) % nb.y);
        int bz = int(i / (std::int64_t(nb.x) * nb.y));
        BrickRecord& r = records[std::size_t(i)];
        r.brick_id = {bx, by, bz};
        r.box = brick_box(r.brick_id, v.dims());
        auto [lo, hi] = v.value_range(r.box.lo, r.box.hi);
        r.lo = lo;
        r.hi = hi;
        r.score = similarity(lo, hi, background, metric);
        r.linear_index = std::uint64_t(i);
    });

    std::sort(records.begin(), records.end(), [background](const BrickRecord& a, const BrickRecord& b) {
        if (a.score != b.score)
            return a.score > b.score;
        bool a_bg = a.lo == background && a.hi == background;
        bool b_bg = b.lo == background && b.hi == background;
        if (a_bg != b_bg)
            return !a_bg;
        return a.linear_index < b.linear_index;
    });
    return records;
}

/// Smallest quality that compresses losslessly: the fraction of bricks whose
/// value range is not exactly [B,B].
inline double lossless_quality(const DenseVolume& v, float background)
{
    Coord nb = brick_counts(v.dims());
    std::uint64_t total = std::uint64_t(nb.x) * std::uint64_t(nb.y) * std::uint64_t(nb.z);
    std::vector<std::uint8_t> informative(total, 0);
    parallel_for(std::int64_t(total), [&](std::int64_t i) {
        Coord id{int(i % nb.x), int((i / nb.x) % nb.y), int(i / (std::int64_t(nb.x) * nb.y))};
        Box3i box = brick_box(id, v.dims());
        auto [lo, hi] = v.value_range(box.lo, box.hi);
        informative[std::size_t(i)] = (lo != background || hi != background) ? 1 : 0;
    });
    std::uint64_t count = 0;
    for (std::uint8_t f : informative)
        count += f;
    return double(count) / double(total);
}

namespace detail {

/// Copies one brick's voxels into the builder. Whole 8^3 leaf blocks that are
/// uniformly background are skipped up front; prune would discard them anyway
/// and this avoids allocating them at all.
inline void activate_brick(SparseGridBuilder& builder, const DenseVolume& v, const Box3i& box,
                           float background)
{
    Coord block_lo = TreeConfig::leaf_origin(box.lo);
    for (int bz = block_lo.z; bz < box.hi.z; bz += TreeConfig::leaf_span)
        for (int by = block_lo.y; by < box.hi.y; by += TreeConfig::leaf_span)
            for (int bx = block_lo.x; bx < box.hi.x; bx += TreeConfig::leaf_span) {
                Box3i block{{bx, by, bz},
                            {bx + TreeConfig::leaf_span, by + TreeConfig::leaf_span,
                             bz + TreeConfig::leaf_span}};
                Box3i clipped = Box3i::intersect(block, box);
                bool full = clipped.lo == block.lo && clipped.hi == block.hi;
                if (full) {
                    bool all_background = true;
                    for (int z = clipped.lo.z; z < clipped.hi.z && all_background; ++z)
                        for (int y = clipped.lo.y; y < clipped.hi.y && all_background; ++y) {
                            const float* row = v.data().data() + v.index(clipped.lo.x, y, z);
                            for (int x = 0; x < TreeConfig::leaf_span; ++x)
                                if (row[x] != background) {
                                    all_background = false;
                                    break;
                                }
                        }
                    if (all_background)
                        continue;
                    LeafNode& leaf = builder.touch_leaf(clipped.lo);
                    for (int z = 0; z < TreeConfig::leaf_span; ++z)
                        for (int y = 0; y < TreeConfig::leaf_span; ++y) {
                            const float* row =
                                v.data().data() + v.index(clipped.lo.x, clipped.lo.y + y, clipped.lo.z + z);
                            float* dst = leaf.values.data()
                                         + TreeConfig::leaf_voxel(Coord{0, y, z});
                            for (int x = 0; x < TreeConfig::leaf_span; ++x)
                                dst[x] = row[x];
                        }
                    for (auto& word : leaf.active.words)
                        word = ~std::uint64_t(0);
                } else {
                    for (int z = clipped.lo.z; z < clipped.hi.z; ++z)
                        for (int y = clipped.lo.y; y < clipped.hi.y; ++y)
                            for (int x = clipped.lo.x; x < clipped.hi.x; ++x)
                                builder.set_voxel({x, y, z}, v.at(x, y, z));
                }
            }
}

} // namespace detail

/// Fixed-rate compression: score all bricks against the detected background,
/// activate the ceil(quality * numBricks) least-similar ones, prune, freeze.
inline std::pair<FrozenGrid, CompressionReport> compress(const DenseVolume& v,
                                                         const CompressionParams& params)
{
    if (!(params.quality >= 0.0 && params.quality <= 1.0))
        fail(Errc::invalid_quality, "quality must be in [0,1]");

    int bins = params.histogram_bins > 0
                   ? params.histogram_bins
                   : (v.voxel_type() == VoxelType::u8 ? 256 : 1024);
    Histogram hist = compute_histogram(v, bins);
    float background = detect_background(v, hist).value;

    std::vector<BrickRecord> records = build_brick_records(v, background, params.metric);
    if (params.most_similar_first)
        std::reverse(records.begin(), records.end());

    std::uint64_t total = records.size();
    std::uint64_t budget =
        std::min<std::uint64_t>(total, std::uint64_t(std::ceil(params.quality * double(total))));

    SparseGridBuilder builder(v.dims(), background);
    builder.voxel_type = v.voxel_type();

    std::uint64_t voxels_activated = 0;
    std::vector<std::uint8_t> chosen(total, 0);
    for (std::uint64_t i = 0; i < budget; ++i) {
        const BrickRecord& r = records[i];
        detail::activate_brick(builder, v, r.box, background);
        voxels_activated += std::uint64_t(r.box.volume());
        chosen[r.linear_index] = 1;
    }

    if (params.activate_corners) {
        Coord nb = brick_counts(v.dims());
        auto corner_brick = [&](Coord c) {
            Coord id{c.x / kBrickDim, c.y / kBrickDim, c.z / kBrickDim};
            return std::uint64_t(id.x)
                   + std::uint64_t(nb.x) * (std::uint64_t(id.y) + std::uint64_t(nb.y) * std::uint64_t(id.z));
        };
        Coord c0{0, 0, 0};
        Coord c1{v.dims().x - 1, v.dims().y - 1, v.dims().z - 1};
        builder.set_voxel(c0, v.at(c0));
        builder.set_voxel(c1, v.at(c1));
        if (!chosen[corner_brick(c0)])
            ++voxels_activated;
        if (c1 != c0 && !chosen[corner_brick(c1)])
            ++voxels_activated;
    }

    builder.prune();
    builder.set_value_domain(v.min_value(), v.max_value());
    FrozenGrid grid = freeze(builder);

    CompressionReport report;
    report.background = background;
    report.num_bricks = total;
    report.bricks_activated = budget;
    report.voxels_activated = voxels_activated;
    report.frozen_bytes = grid.byte_size();
    report.dense_bytes = DenseVolume::voxel_count(v.dims()) * 4;
    report.achieved_ratio = double(report.frozen_bytes) / double(report.dense_bytes);
    return {std::move(grid), report};
}

} // namespace svdb
