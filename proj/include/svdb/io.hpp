// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/frozen.hpp"

namespace svdb {

// SVDB container, little-endian, all sections 8-byte aligned:
//
//   offset  size      field
//   0       4         magic "SVDB"
//   4       4         version (u32) = 1
//   8       4         voxel_type (u32): 0 = u8, 1 = f32
//   12      12        dims (3 x u32)
//   24      4         background (f32)
//   28      8         value_domain (2 x f32)
//   36      32        counts (4 x u64): upper, lower, leaf, root entries
//   68      4         zero padding
//   72      16*R      root directory: { origin 3 x i32, upper index u32 }
//   ...     139280*U  upper nodes:  { origin 3 x i32, pad u32,
//                                     payload 32768 x u32,
//                                     child mask 32768 bits, tile mask 32768 bits }
//   ...     17424*L   lower nodes:  same shape with 4096 slots
//   ...     2128*F    leaves:       { origin 3 x i32, pad u32,
//                                     active mask 512 bits, values 512 x f32 }
//
// Payloads hold a child array index where the child-mask bit is set, the bit
// pattern of the f32 tile value where the tile-mask bit is set, and zero
// otherwise. Mask words are u64, LSB-first.

static_assert(std::endian::native == std::endian::little,
              "SVDB serialization assumes a little-endian host");

inline constexpr std::uint32_t kSvdbVersion = 1;
inline constexpr char kSvdbMagic[4] = {'S', 'V', 'D', 'B'};

namespace detail {

struct Writer {
    std::ostream& os;

    void bytes(const void* p, std::size_t n)
    {
        os.write(static_cast<const char*>(p), std::streamsize(n));
    }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f32(float v) { bytes(&v, 4); }
    void i32x3(const Coord& c)
    {
        std::int32_t o[3] = {c.x, c.y, c.z};
        bytes(o, 12);
    }
};

struct Parser {
    const std::uint8_t* p;
    const std::uint8_t* end;

    void bytes(void* out, std::size_t n)
    {
        if (std::size_t(end - p) < n)
            fail(Errc::corrupt_index, "unexpected end of SVDB data");
        std::memcpy(out, p, n);
        p += n;
    }
    std::uint32_t u32()
    {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64()
    {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    float f32()
    {
        float v;
        bytes(&v, 4);
        return v;
    }
    Coord i32x3()
    {
        std::int32_t o[3];
        bytes(o, 12);
        return {o[0], o[1], o[2]};
    }
};

template <int N>
void write_mask(Writer& w, const BitMask<N>& m)
{
    w.bytes(m.words.data(), m.words.size() * 8);
}

template <int N>
void read_mask(Parser& r, BitMask<N>& m)
{
    r.bytes(m.words.data(), m.words.size() * 8);
}

} // namespace detail

inline void write_frozen(const FrozenGrid& g, std::ostream& os)
{
    detail::Writer w{os};
    w.bytes(kSvdbMagic, 4);
    w.u32(kSvdbVersion);
    w.u32(std::uint32_t(g.voxel_type));
    w.u32(std::uint32_t(g.dims.x));
    w.u32(std::uint32_t(g.dims.y));
    w.u32(std::uint32_t(g.dims.z));
    w.f32(g.background);
    w.f32(g.value_domain.first);
    w.f32(g.value_domain.second);
    w.u64(g.uppers.size());
    w.u64(g.lowers.size());
    w.u64(g.leaves.size());
    w.u64(g.root.size());
    w.u32(0); // pad header to 72

    for (const RootEntry& e : g.root) {
        w.i32x3(e.origin);
        w.u32(e.upper_index);
    }
    for (const FrozenUpper& n : g.uppers) {
        w.i32x3(n.origin);
        w.u32(0);
        w.bytes(n.payload.data(), n.payload.size() * 4);
        detail::write_mask(w, n.child_mask);
        detail::write_mask(w, n.tile_mask);
    }
    for (const FrozenLower& n : g.lowers) {
        w.i32x3(n.origin);
        w.u32(0);
        w.bytes(n.payload.data(), n.payload.size() * 4);
        detail::write_mask(w, n.child_mask);
        detail::write_mask(w, n.tile_mask);
    }
    for (const FrozenLeaf& n : g.leaves) {
        w.i32x3(n.origin);
        w.u32(0);
        detail::write_mask(w, n.active);
        w.bytes(n.values.data(), n.values.size() * 4);
    }
    if (!os)
        fail(Errc::io_error, "write failed");
}

inline void write_frozen(const FrozenGrid& g, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        fail(Errc::io_error, "cannot open " + path.string() + " for writing");
    write_frozen(g, os);
}

inline std::vector<std::uint8_t> serialize_frozen(const FrozenGrid& g)
{
    std::ostringstream os(std::ios::binary);
    write_frozen(g, os);
    std::string s = os.str();
    return {s.begin(), s.end()};
}

inline FrozenGrid parse_frozen(const std::uint8_t* data, std::size_t size)
{
    detail::Parser r{data, data + size};
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kSvdbMagic, 4) != 0)
        fail(Errc::bad_magic, "not an SVDB file");
    std::uint32_t version = r.u32();
    if (version != kSvdbVersion)
        fail(Errc::version_mismatch, "unsupported SVDB version " + std::to_string(version));

    FrozenGrid g;
    std::uint32_t vt = r.u32();
    if (vt > 1)
        fail(Errc::corrupt_index, "invalid voxel type");
    g.voxel_type = VoxelType(vt);
    g.dims.x = int(r.u32());
    g.dims.y = int(r.u32());
    g.dims.z = int(r.u32());
    if (g.dims.x < 1 || g.dims.y < 1 || g.dims.z < 1)
        fail(Errc::corrupt_index, "invalid dims");
    g.background = r.f32();
    g.value_domain.first = r.f32();
    g.value_domain.second = r.f32();
    std::uint64_t n_upper = r.u64();
    std::uint64_t n_lower = r.u64();
    std::uint64_t n_leaf = r.u64();
    std::uint64_t n_root = r.u64();
    r.u32(); // header padding

    if (n_upper > (std::uint64_t(1) << 32) || n_lower > (std::uint64_t(1) << 32)
        || n_leaf > (std::uint64_t(1) << 32) || n_root > (std::uint64_t(1) << 32))
        fail(Errc::corrupt_index, "implausible section counts");
    if (FrozenLayout::total_bytes(n_upper, n_lower, n_leaf, n_root) != size)
        fail(Errc::corrupt_index, "section counts do not match data size");

    g.root.resize(n_root);
    for (RootEntry& e : g.root) {
        e.origin = r.i32x3();
        e.upper_index = r.u32();
        if (e.upper_index >= n_upper)
            fail(Errc::corrupt_index, "root entry references missing upper node");
    }
    g.uppers.resize(n_upper);
    for (FrozenUpper& n : g.uppers) {
        n.origin = r.i32x3();
        r.u32();
        r.bytes(n.payload.data(), n.payload.size() * 4);
        detail::read_mask(r, n.child_mask);
        detail::read_mask(r, n.tile_mask);
        for (int s = 0; s < TreeConfig::upper_size; ++s)
            if (n.child_mask.test(s) && n.payload[std::size_t(s)] >= n_lower)
                fail(Errc::corrupt_index, "upper node child index out of range");
    }
    g.lowers.resize(n_lower);
    for (FrozenLower& n : g.lowers) {
        n.origin = r.i32x3();
        r.u32();
        r.bytes(n.payload.data(), n.payload.size() * 4);
        detail::read_mask(r, n.child_mask);
        detail::read_mask(r, n.tile_mask);
        for (int s = 0; s < TreeConfig::lower_size; ++s)
            if (n.child_mask.test(s) && n.payload[std::size_t(s)] >= n_leaf)
                fail(Errc::corrupt_index, "lower node child index out of range");
    }
    g.leaves.resize(n_leaf);
    for (FrozenLeaf& n : g.leaves) {
        n.origin = r.i32x3();
        r.u32();
        detail::read_mask(r, n.active);
        r.bytes(n.values.data(), n.values.size() * 4);
    }
    return g;
}

inline FrozenGrid read_frozen(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::io_error, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    if (!in.eof() && in.fail())
        fail(Errc::io_error, "read failed for " + path.string());
    return parse_frozen(bytes.data(), bytes.size());
}

} // namespace svdb
