// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "svdb/tree.hpp"
#include "svdb/vec.hpp"
#include "svdb/volume.hpp"

namespace svdb {

// Immutable, contiguous snapshot of a SparseGridBuilder. All cross references
// are array indices, never pointers, so the whole structure can be copied or
// mapped byte-for-byte. Node payloads are either a child index or the bit
// pattern of a float tile value, discriminated by the child/tile masks.

struct FrozenUpper {
    Coord origin;
    std::array<std::uint32_t, TreeConfig::upper_size> payload;
    BitMask<TreeConfig::upper_size> child_mask;
    BitMask<TreeConfig::upper_size> tile_mask;
};

struct FrozenLower {
    Coord origin;
    std::array<std::uint32_t, TreeConfig::lower_size> payload;
    BitMask<TreeConfig::lower_size> child_mask;
    BitMask<TreeConfig::lower_size> tile_mask;
};

struct FrozenLeaf {
    Coord origin;
    BitMask<TreeConfig::leaf_size> active;
    std::array<float, TreeConfig::leaf_size> values;
};

struct RootEntry {
    Coord origin;
    std::uint32_t upper_index;
};

// Serialized record sizes (bytes). Sections are 8-byte aligned; each node
// record starts with its origin as 3 x i32 plus 4 zero-padding bytes so that
// record strides stay multiples of 8. See io.hpp for the full layout.
struct FrozenLayout {
    static constexpr std::uint64_t header_bytes = 72;
    static constexpr std::uint64_t root_entry_bytes = 16;
    static constexpr std::uint64_t upper_bytes = 16 + 4 * TreeConfig::upper_size
                                                 + 2 * (TreeConfig::upper_size / 8); // 139280
    static constexpr std::uint64_t lower_bytes = 16 + 4 * TreeConfig::lower_size
                                                 + 2 * (TreeConfig::lower_size / 8); // 17424
    static constexpr std::uint64_t leaf_bytes = 16 + TreeConfig::leaf_size / 8
                                                + 4 * TreeConfig::leaf_size; // 2128

    static std::uint64_t total_bytes(std::uint64_t uppers, std::uint64_t lowers,
                                     std::uint64_t leaves, std::uint64_t root_entries)
    {
        return header_bytes + root_entry_bytes * root_entries + upper_bytes * uppers
               + lower_bytes * lowers + leaf_bytes * leaves;
    }
};

class FrozenGrid {
public:
    Coord dims{0, 0, 0};
    float background = 0.0f;
    VoxelType voxel_type = VoxelType::f32;
    std::pair<float, float> value_domain{0.0f, 0.0f};

    std::vector<RootEntry> root;      // sorted by origin (z,y,x)
    std::vector<FrozenUpper> uppers;  // ascending origin order
    std::vector<FrozenLower> lowers;
    std::vector<FrozenLeaf> leaves;

    float read_voxel(const Coord& ijk) const
    {
        const FrozenUpper* upper = find_upper(TreeConfig::upper_origin(ijk));
        if (!upper)
            return background;
        int us = TreeConfig::upper_slot(ijk);
        if (upper->tile_mask.test(us))
            return std::bit_cast<float>(upper->payload[std::size_t(us)]);
        if (!upper->child_mask.test(us))
            return background;
        const FrozenLower& lower = lowers[upper->payload[std::size_t(us)]];
        int ls = TreeConfig::lower_slot(ijk);
        if (lower.tile_mask.test(ls))
            return std::bit_cast<float>(lower.payload[std::size_t(ls)]);
        if (!lower.child_mask.test(ls))
            return background;
        return leaves[lower.payload[std::size_t(ls)]].values[std::size_t(TreeConfig::leaf_voxel(ijk))];
    }

    const FrozenUpper* find_upper(const Coord& origin) const
    {
        auto it = std::lower_bound(root.begin(), root.end(), origin,
                                   [](const RootEntry& e, const Coord& o) {
                                       return CoordZyxLess{}(e.origin, o);
                                   });
        if (it == root.end() || it->origin != origin)
            return nullptr;
        return &uppers[it->upper_index];
    }

    std::uint64_t byte_size() const
    {
        return FrozenLayout::total_bytes(uppers.size(), lowers.size(), leaves.size(), root.size());
    }

    /// Structurally active voxels: set leaf voxels plus tile footprints.
    std::uint64_t active_voxel_count() const
    {
        std::uint64_t n = 0;
        for (const FrozenLeaf& leaf : leaves)
            n += std::uint64_t(leaf.active.count());
        for (const FrozenLower& lower : lowers)
            n += std::uint64_t(lower.tile_mask.count()) * TreeConfig::leaf_size;
        std::uint64_t upper_tile_voxels = std::uint64_t(TreeConfig::lower_span)
                                          * TreeConfig::lower_span * TreeConfig::lower_span;
        for (const FrozenUpper& upper : uppers)
            n += std::uint64_t(upper.tile_mask.count()) * upper_tile_voxels;
        return n;
    }
};

/// Snapshots a builder. Layout is deterministic: root entries and all node
/// arrays are emitted in ascending (z,y,x) origin order, so equal trees
/// freeze to byte-identical grids.
inline FrozenGrid freeze(const SparseGridBuilder& b)
{
    FrozenGrid g;
    g.dims = b.dims();
    g.background = b.background();
    g.voxel_type = b.voxel_type;
    g.value_domain = b.value_domain();

    std::vector<const UpperNode*> upper_nodes;
    for (const auto& [origin, node] : b.roots())
        upper_nodes.push_back(node.get()); // RootMap iterates in (z,y,x) order already

    std::vector<const LowerNode*> lower_nodes;
    for (const UpperNode* u : upper_nodes)
        for (int s = 0; s < TreeConfig::upper_size; ++s)
            if (u->child_mask.test(s))
                lower_nodes.push_back(u->children[std::size_t(s)].get());
    std::sort(lower_nodes.begin(), lower_nodes.end(),
              [](const LowerNode* a, const LowerNode* b2) {
                  return CoordZyxLess{}(a->origin, b2->origin);
              });

    std::vector<const LeafNode*> leaf_nodes;
    for (const LowerNode* l : lower_nodes)
        for (int s = 0; s < TreeConfig::lower_size; ++s)
            if (l->child_mask.test(s))
                leaf_nodes.push_back(l->children[std::size_t(s)].get());
    std::sort(leaf_nodes.begin(), leaf_nodes.end(),
              [](const LeafNode* a, const LeafNode* b2) {
                  return CoordZyxLess{}(a->origin, b2->origin);
              });

    std::map<const LowerNode*, std::uint32_t> lower_index;
    for (std::size_t i = 0; i < lower_nodes.size(); ++i)
        lower_index[lower_nodes[i]] = std::uint32_t(i);
    std::map<const LeafNode*, std::uint32_t> leaf_index;
    for (std::size_t i = 0; i < leaf_nodes.size(); ++i)
        leaf_index[leaf_nodes[i]] = std::uint32_t(i);

    g.uppers.reserve(upper_nodes.size());
    for (std::size_t i = 0; i < upper_nodes.size(); ++i) {
        const UpperNode& src = *upper_nodes[i];
        FrozenUpper dst;
        dst.origin = src.origin;
        dst.child_mask = src.child_mask;
        dst.tile_mask = src.tile_mask;
        dst.payload.fill(0);
        for (int s = 0; s < TreeConfig::upper_size; ++s) {
            if (src.child_mask.test(s))
                dst.payload[std::size_t(s)] = lower_index.at(src.children[std::size_t(s)].get());
            else if (src.tile_mask.test(s))
                dst.payload[std::size_t(s)] = std::bit_cast<std::uint32_t>(src.tiles[std::size_t(s)]);
        }
        g.uppers.push_back(dst);
        g.root.push_back({src.origin, std::uint32_t(i)});
    }

    g.lowers.reserve(lower_nodes.size());
    for (const LowerNode* src : lower_nodes) {
        FrozenLower dst;
        dst.origin = src->origin;
        dst.child_mask = src->child_mask;
        dst.tile_mask = src->tile_mask;
        dst.payload.fill(0);
        for (int s = 0; s < TreeConfig::lower_size; ++s) {
            if (src->child_mask.test(s))
                dst.payload[std::size_t(s)] = leaf_index.at(src->children[std::size_t(s)].get());
            else if (src->tile_mask.test(s))
                dst.payload[std::size_t(s)] = std::bit_cast<std::uint32_t>(src->tiles[std::size_t(s)]);
        }
        g.lowers.push_back(dst);
    }

    g.leaves.reserve(leaf_nodes.size());
    for (const LeafNode* src : leaf_nodes) {
        FrozenLeaf dst;
        dst.origin = src->origin;
        dst.active = src->active;
        dst.values = src->values;
        g.leaves.push_back(dst);
    }
    return g;
}

inline float read_voxel(const FrozenGrid& g, const Coord& ijk)
{
    return g.read_voxel(ijk);
}

/// Read-through cache over a FrozenGrid. Remembers the last visited node on
/// each level so coherent queries skip the top-down walk. One accessor per
/// thread; creating one is cheap.
class Accessor {
public:
    explicit Accessor(const FrozenGrid& g) : grid_(&g) {}

    const FrozenGrid& grid() const { return *grid_; }

    float read(const Coord& ijk) const
    {
        if (leaf_ && TreeConfig::leaf_origin(ijk) == leaf_->origin)
            return leaf_->values[std::size_t(TreeConfig::leaf_voxel(ijk))];
        if (lower_ && TreeConfig::lower_origin(ijk) == lower_->origin)
            return read_from_lower(ijk);
        if (upper_ && TreeConfig::upper_origin(ijk) == upper_->origin)
            return read_from_upper(ijk);
        upper_ = grid_->find_upper(TreeConfig::upper_origin(ijk));
        if (!upper_)
            return grid_->background;
        return read_from_upper(ijk);
    }

    float operator()(const Coord& ijk) const { return read(ijk); }

private:
    float read_from_upper(const Coord& ijk) const
    {
        int us = TreeConfig::upper_slot(ijk);
        if (upper_->tile_mask.test(us))
            return std::bit_cast<float>(upper_->payload[std::size_t(us)]);
        if (!upper_->child_mask.test(us))
            return grid_->background;
        lower_ = &grid_->lowers[upper_->payload[std::size_t(us)]];
        return read_from_lower(ijk);
    }

    float read_from_lower(const Coord& ijk) const
    {
        int ls = TreeConfig::lower_slot(ijk);
        if (lower_->tile_mask.test(ls))
            return std::bit_cast<float>(lower_->payload[std::size_t(ls)]);
        if (!lower_->child_mask.test(ls))
            return grid_->background;
        leaf_ = &grid_->leaves[lower_->payload[std::size_t(ls)]];
        return leaf_->values[std::size_t(TreeConfig::leaf_voxel(ijk))];
    }

    const FrozenGrid* grid_;
    mutable const FrozenUpper* upper_ = nullptr;
    mutable const FrozenLower* lower_ = nullptr;
    mutable const FrozenLeaf* leaf_ = nullptr;
};

} // namespace svdb
