// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/vec.hpp"
#include "svdb/volume.hpp"

namespace svdb {

// Four-level {5,4,3} tree. Per level (log2 of children per axis):
//   upper internal  2^5 = 32^3 slots, each covering 128^3 voxels -> node spans 4096^3
//   lower internal  2^4 = 16^3 slots, each covering 8^3 voxels   -> node spans 128^3
//   leaf            2^3 =  8^3 voxels
// The root is a directory of upper nodes keyed by origin.
struct TreeConfig {
    static constexpr int log2_leaf = 3;
    static constexpr int log2_lower = 4;
    static constexpr int log2_upper = 5;

    static constexpr int leaf_dim = 1 << log2_leaf;    // 8
    static constexpr int lower_dim = 1 << log2_lower;  // 16
    static constexpr int upper_dim = 1 << log2_upper;  // 32

    static constexpr int leaf_size = leaf_dim * leaf_dim * leaf_dim;    // 512
    static constexpr int lower_size = lower_dim * lower_dim * lower_dim; // 4096
    static constexpr int upper_size = upper_dim * upper_dim * upper_dim; // 32768

    // Voxel footprint of one node / one slot, per axis.
    static constexpr int leaf_span = leaf_dim;                  // 8
    static constexpr int lower_span = leaf_span * lower_dim;    // 128
    static constexpr int upper_span = lower_span * upper_dim;   // 4096

    static constexpr Coord leaf_origin(const Coord& ijk)
    {
        return {ijk.x & ~(leaf_span - 1), ijk.y & ~(leaf_span - 1), ijk.z & ~(leaf_span - 1)};
    }
    static constexpr Coord lower_origin(const Coord& ijk)
    {
        return {ijk.x & ~(lower_span - 1), ijk.y & ~(lower_span - 1), ijk.z & ~(lower_span - 1)};
    }
    static constexpr Coord upper_origin(const Coord& ijk)
    {
        return {ijk.x & ~(upper_span - 1), ijk.y & ~(upper_span - 1), ijk.z & ~(upper_span - 1)};
    }

    // Slot indices are x-fastest, z-slowest, matching the (z,y,x) node order.
    static constexpr int upper_slot(const Coord& ijk)
    {
        int sx = (ijk.x >> 7) & 31, sy = (ijk.y >> 7) & 31, sz = (ijk.z >> 7) & 31;
        return sx + upper_dim * (sy + upper_dim * sz);
    }
    static constexpr int lower_slot(const Coord& ijk)
    {
        int sx = (ijk.x >> 3) & 15, sy = (ijk.y >> 3) & 15, sz = (ijk.z >> 3) & 15;
        return sx + lower_dim * (sy + lower_dim * sz);
    }
    static constexpr int leaf_voxel(const Coord& ijk)
    {
        int vx = ijk.x & 7, vy = ijk.y & 7, vz = ijk.z & 7;
        return vx + leaf_dim * (vy + leaf_dim * vz);
    }

    static constexpr Coord upper_slot_origin(const Coord& node_origin, int slot)
    {
        int sx = slot % upper_dim, sy = (slot / upper_dim) % upper_dim, sz = slot / (upper_dim * upper_dim);
        return {node_origin.x + sx * lower_span, node_origin.y + sy * lower_span,
                node_origin.z + sz * lower_span};
    }
    static constexpr Coord lower_slot_origin(const Coord& node_origin, int slot)
    {
        int sx = slot % lower_dim, sy = (slot / lower_dim) % lower_dim, sz = slot / (lower_dim * lower_dim);
        return {node_origin.x + sx * leaf_span, node_origin.y + sy * leaf_span,
                node_origin.z + sz * leaf_span};
    }
};

/// Fixed-width bit mask with 64-bit words, LSB-first within a word.
template <int N>
struct BitMask {
    static_assert(N % 64 == 0);
    static constexpr int word_count = N / 64;
    std::array<std::uint64_t, word_count> words{};

    bool test(int i) const { return (words[std::size_t(i >> 6)] >> (i & 63)) & 1; }
    void set(int i) { words[std::size_t(i >> 6)] |= std::uint64_t(1) << (i & 63); }
    void clear(int i) { words[std::size_t(i >> 6)] &= ~(std::uint64_t(1) << (i & 63)); }

    int count() const
    {
        int n = 0;
        for (std::uint64_t w : words)
            n += std::popcount(w);
        return n;
    }
    bool none() const
    {
        for (std::uint64_t w : words)
            if (w)
                return false;
        return true;
    }
    bool all() const
    {
        for (std::uint64_t w : words)
            if (w != ~std::uint64_t(0))
                return false;
        return true;
    }
    bool operator==(const BitMask&) const = default;
};

struct LeafNode {
    Coord origin;
    BitMask<TreeConfig::leaf_size> active;
    std::array<float, TreeConfig::leaf_size> values; // inactive slots hold the background

    explicit LeafNode(Coord org, float background) : origin(org) { values.fill(background); }
};

struct LowerNode {
    Coord origin;
    BitMask<TreeConfig::lower_size> child_mask;
    BitMask<TreeConfig::lower_size> tile_mask;
    std::array<float, TreeConfig::lower_size> tiles{};
    std::vector<std::unique_ptr<LeafNode>> children;

    explicit LowerNode(Coord org) : origin(org), children(TreeConfig::lower_size) {}
};

struct UpperNode {
    Coord origin;
    BitMask<TreeConfig::upper_size> child_mask;
    BitMask<TreeConfig::upper_size> tile_mask;
    std::vector<float> tiles;
    std::vector<std::unique_ptr<LowerNode>> children;

    explicit UpperNode(Coord org)
        : origin(org), tiles(TreeConfig::upper_size, 0.0f), children(TreeConfig::upper_size)
    {
    }
};

enum class TileLevel {
    lower_slot, // one 8^3 slot inside a lower node
    upper_slot, // one 128^3 slot inside an upper node
};

struct PruneStats {
    std::uint64_t leaves_removed = 0;   // empty or uniformly-background leaves dropped
    std::uint64_t leaves_collapsed = 0; // fully-active uniform leaves turned into tiles
    std::uint64_t lower_collapsed = 0;  // uniform lower nodes turned into upper-slot tiles
};

/// Mutable {5,4,3} tree. Single-writer; voxels not explicitly activated read
/// as the background value.
class SparseGridBuilder {
public:
    SparseGridBuilder(Coord dims, float background)
        : dims_(dims), background_(background), domain_{background, background}
    {
        if (dims.x < 1 || dims.y < 1 || dims.z < 1)
            fail(Errc::size_mismatch, "grid dims must be positive");
    }

    Coord dims() const { return dims_; }
    float background() const { return background_; }

    // Header metadata carried through freeze(); compression overwrites these
    // with the source volume's type and domain.
    VoxelType voxel_type = VoxelType::f32;
    std::pair<float, float> value_domain() const { return domain_; }
    void set_value_domain(float lo, float hi) { domain_ = {lo, hi}; }

    void set_voxel(const Coord& ijk, float value)
    {
        if (ijk.x < 0 || ijk.y < 0 || ijk.z < 0 || ijk.x >= dims_.x || ijk.y >= dims_.y
            || ijk.z >= dims_.z)
            fail(Errc::out_of_bounds, "set_voxel at (" + std::to_string(ijk.x) + ","
                                          + std::to_string(ijk.y) + "," + std::to_string(ijk.z) + ")");
        LeafNode& leaf = touch_leaf(ijk);
        int v = TreeConfig::leaf_voxel(ijk);
        leaf.values[std::size_t(v)] = value;
        leaf.active.set(v);
        widen_domain(value);
    }

    /// Materializes (or fetches) the leaf containing ijk, expanding any tile
    /// that covers it. Bulk writers may fill the returned leaf directly; the
    /// per-leaf cache makes consecutive same-leaf writes cheap.
    LeafNode& touch_leaf(const Coord& ijk)
    {
        Coord lorg = TreeConfig::leaf_origin(ijk);
        if (cached_leaf_ && cached_leaf_->origin == lorg)
            return *cached_leaf_;

        UpperNode& upper = touch_upper(TreeConfig::upper_origin(ijk));
        int us = TreeConfig::upper_slot(ijk);
        if (!upper.children[std::size_t(us)]) {
            auto lower = std::make_unique<LowerNode>(TreeConfig::lower_origin(ijk));
            if (upper.tile_mask.test(us)) {
                // expand the covering 128^3 tile into a lower node of 8^3 tiles
                float tv = upper.tiles[std::size_t(us)];
                for (int i = 0; i < TreeConfig::lower_size; ++i) {
                    lower->tile_mask.set(i);
                    lower->tiles[std::size_t(i)] = tv;
                }
                upper.tile_mask.clear(us);
            }
            upper.children[std::size_t(us)] = std::move(lower);
            upper.child_mask.set(us);
        }
        LowerNode& lower = *upper.children[std::size_t(us)];

        int ls = TreeConfig::lower_slot(ijk);
        if (!lower.children[std::size_t(ls)]) {
            auto leaf = std::make_unique<LeafNode>(lorg, background_);
            if (lower.tile_mask.test(ls)) {
                float tv = lower.tiles[std::size_t(ls)];
                leaf->values.fill(tv);
                for (int i = 0; i < TreeConfig::leaf_size; ++i)
                    leaf->active.set(i);
                lower.tile_mask.clear(ls);
            }
            lower.children[std::size_t(ls)] = std::move(leaf);
            lower.child_mask.set(ls);
        }
        cached_leaf_ = lower.children[std::size_t(ls)].get();
        return *cached_leaf_;
    }

    /// Sets one internal-node slot to a constant active tile. Replaces any
    /// subtree currently stored under that slot.
    void set_tile(TileLevel level, const Coord& origin, float value)
    {
        cached_leaf_ = nullptr;
        if (level == TileLevel::upper_slot) {
            if (origin != TreeConfig::lower_origin(origin))
                fail(Errc::misaligned, "upper-slot tile origin must be 128-aligned");
            UpperNode& upper = touch_upper(TreeConfig::upper_origin(origin));
            int us = TreeConfig::upper_slot(origin);
            upper.children[std::size_t(us)].reset();
            upper.child_mask.clear(us);
            upper.tile_mask.set(us);
            upper.tiles[std::size_t(us)] = value;
        } else {
            if (origin != TreeConfig::leaf_origin(origin))
                fail(Errc::misaligned, "lower-slot tile origin must be 8-aligned");
            UpperNode& upper = touch_upper(TreeConfig::upper_origin(origin));
            int us = TreeConfig::upper_slot(origin);
            if (!upper.children[std::size_t(us)]) {
                auto lower = std::make_unique<LowerNode>(TreeConfig::lower_origin(origin));
                if (upper.tile_mask.test(us)) {
                    float tv = upper.tiles[std::size_t(us)];
                    for (int i = 0; i < TreeConfig::lower_size; ++i) {
                        lower->tile_mask.set(i);
                        lower->tiles[std::size_t(i)] = tv;
                    }
                    upper.tile_mask.clear(us);
                }
                upper.children[std::size_t(us)] = std::move(lower);
                upper.child_mask.set(us);
            }
            LowerNode& lower = *upper.children[std::size_t(us)];
            int ls = TreeConfig::lower_slot(origin);
            lower.children[std::size_t(ls)].reset();
            lower.child_mask.clear(ls);
            lower.tile_mask.set(ls);
            lower.tiles[std::size_t(ls)] = value;
        }
        widen_domain(value);
    }

    /// Active voxel value, covering tile value, or background. Out-of-bounds
    /// coordinates are legal and read as background.
    float read_voxel(const Coord& ijk) const
    {
        auto it = roots_.find(TreeConfig::upper_origin(ijk));
        if (it == roots_.end())
            return background_;
        const UpperNode& upper = *it->second;
        int us = TreeConfig::upper_slot(ijk);
        if (upper.tile_mask.test(us))
            return upper.tiles[std::size_t(us)];
        if (!upper.child_mask.test(us))
            return background_;
        const LowerNode& lower = *upper.children[std::size_t(us)];
        int ls = TreeConfig::lower_slot(ijk);
        if (lower.tile_mask.test(ls))
            return lower.tiles[std::size_t(ls)];
        if (!lower.child_mask.test(ls))
            return background_;
        return lower.children[std::size_t(ls)]->values[std::size_t(TreeConfig::leaf_voxel(ijk))];
    }

    bool is_active(const Coord& ijk) const
    {
        auto it = roots_.find(TreeConfig::upper_origin(ijk));
        if (it == roots_.end())
            return false;
        const UpperNode& upper = *it->second;
        int us = TreeConfig::upper_slot(ijk);
        if (upper.tile_mask.test(us))
            return true;
        if (!upper.child_mask.test(us))
            return false;
        const LowerNode& lower = *upper.children[std::size_t(us)];
        int ls = TreeConfig::lower_slot(ijk);
        if (lower.tile_mask.test(ls))
            return true;
        if (!lower.child_mask.test(ls))
            return false;
        return lower.children[std::size_t(ls)]->active.test(TreeConfig::leaf_voxel(ijk));
    }

    /// Semantics-preserving cleanup:
    ///  (a) leaves with no active voxel are removed;
    ///  (b) fully-active uniform leaves collapse to lower-slot tiles;
    ///  (c) lower nodes whose slots are all tiles of one value collapse to an
    ///      upper-slot tile.
    /// Tiles whose value equals the background revert to empty slots (a read
    /// cannot tell them apart), so a background tile costs no frozen bytes.
    PruneStats prune()
    {
        cached_leaf_ = nullptr;
        PruneStats stats;
        for (auto root_it = roots_.begin(); root_it != roots_.end();) {
            UpperNode& upper = *root_it->second;
            for (int us = 0; us < TreeConfig::upper_size; ++us) {
                if (upper.tile_mask.test(us) && upper.tiles[std::size_t(us)] == background_) {
                    upper.tile_mask.clear(us);
                    continue;
                }
                if (!upper.child_mask.test(us))
                    continue;
                LowerNode& lower = *upper.children[std::size_t(us)];
                prune_lower(lower, stats);

                if (lower.child_mask.none()) {
                    bool uniform = true;
                    float tv = 0.0f;
                    bool first = true;
                    for (int ls = 0; ls < TreeConfig::lower_size && uniform; ++ls) {
                        if (!lower.tile_mask.test(ls)) {
                            uniform = false; // an empty slot reads background
                            break;
                        }
                        float v = lower.tiles[std::size_t(ls)];
                        if (first) {
                            tv = v;
                            first = false;
                        } else if (v != tv) {
                            uniform = false;
                        }
                    }
                    if (uniform && !first) {
                        upper.children[std::size_t(us)].reset();
                        upper.child_mask.clear(us);
                        upper.tile_mask.set(us);
                        upper.tiles[std::size_t(us)] = tv;
                        ++stats.lower_collapsed;
                    } else if (lower.tile_mask.none()) {
                        upper.children[std::size_t(us)].reset();
                        upper.child_mask.clear(us);
                    }
                }
            }
            if (upper.child_mask.none() && upper.tile_mask.none())
                root_it = roots_.erase(root_it);
            else
                ++root_it;
        }
        return stats;
    }

    using RootMap = std::map<Coord, std::unique_ptr<UpperNode>, CoordZyxLess>;
    const RootMap& roots() const { return roots_; }

private:
    void prune_lower(LowerNode& lower, PruneStats& stats)
    {
        for (int ls = 0; ls < TreeConfig::lower_size; ++ls) {
            if (lower.tile_mask.test(ls) && lower.tiles[std::size_t(ls)] == background_) {
                lower.tile_mask.clear(ls);
                continue;
            }
            if (!lower.child_mask.test(ls))
                continue;
            LeafNode& leaf = *lower.children[std::size_t(ls)];
            if (leaf.active.none()) {
                lower.children[std::size_t(ls)].reset();
                lower.child_mask.clear(ls);
                ++stats.leaves_removed;
                continue;
            }
            if (!leaf.active.all())
                continue;
            float v0 = leaf.values[0];
            bool uniform = true;
            for (float v : leaf.values)
                if (v != v0) {
                    uniform = false;
                    break;
                }
            if (!uniform)
                continue;
            lower.children[std::size_t(ls)].reset();
            lower.child_mask.clear(ls);
            if (v0 == background_) {
                ++stats.leaves_removed;
            } else {
                lower.tile_mask.set(ls);
                lower.tiles[std::size_t(ls)] = v0;
                ++stats.leaves_collapsed;
            }
        }
    }

    UpperNode& touch_upper(const Coord& origin)
    {
        auto it = roots_.find(origin);
        if (it == roots_.end())
            it = roots_.emplace(origin, std::make_unique<UpperNode>(origin)).first;
        return *it->second;
    }

    void widen_domain(float v)
    {
        domain_.first = std::min(domain_.first, v);
        domain_.second = std::max(domain_.second, v);
    }

    Coord dims_;
    float background_;
    std::pair<float, float> domain_;
    RootMap roots_;
    LeafNode* cached_leaf_ = nullptr;
};

} // namespace svdb
