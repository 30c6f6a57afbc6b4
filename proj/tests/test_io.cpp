// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include <svdb/compress.hpp>
#include <svdb/io.hpp>
#include <svdb/synth.hpp>

#include "oracles.hpp"

using namespace svdb;
namespace oracle = testing_oracles;

namespace {

std::vector<FrozenGrid> sample_grids()
{
    std::vector<FrozenGrid> grids;

    SparseGridBuilder empty({16, 16, 16}, 0.0f);
    grids.push_back(freeze(empty));

    SparseGridBuilder one({32, 32, 32}, 0.5f);
    one.set_voxel({9, 3, 17}, 2.0f);
    grids.push_back(freeze(one));

    SparseGridBuilder tiles({256, 200, 180}, 0.0f);
    tiles.set_tile(TileLevel::upper_slot, {128, 0, 0}, 3.0f);
    tiles.set_tile(TileLevel::lower_slot, {0, 8, 16}, -1.0f);
    tiles.set_voxel({1, 1, 1}, 0.25f);
    grids.push_back(freeze(tiles));

    grids.push_back(compress(synth_blobs({64, 64, 64}, 5), CompressionParams{}).first);

    CompressionParams half;
    half.quality = 0.5;
    grids.push_back(compress(synth_noise({48, 40, 56}, 9), half).first);

    return grids;
}

} // namespace

TEST(Io, RoundTripIsByteIdentical)
{
    int index = 0;
    for (const FrozenGrid& g : sample_grids()) {
        auto path = oracle::temp_dir() / ("roundtrip_" + std::to_string(index++) + ".svdb");
        write_frozen(g, path);
        auto bytes = oracle::read_file_bytes(path);
        ASSERT_EQ(bytes.size(), g.byte_size());

        FrozenGrid loaded = read_frozen(path);
        EXPECT_EQ(serialize_frozen(loaded), bytes); // write(read(f)) == f

        EXPECT_EQ(loaded.dims, g.dims);
        EXPECT_EQ(loaded.background, g.background);
        Rng rng(1);
        for (int i = 0; i < 2000; ++i) {
            Coord c{int(rng.uniform() * 300) - 20, int(rng.uniform() * 300) - 20,
                    int(rng.uniform() * 300) - 20};
            ASSERT_EQ(loaded.read_voxel(c), g.read_voxel(c));
        }
    }
}

TEST(Io, TruncatedFileNeverCrashes)
{
    FrozenGrid g = compress(synth_blobs({64, 64, 64}, 5), CompressionParams{}).first;
    std::vector<std::uint8_t> bytes = serialize_frozen(g);
    for (std::size_t keep : {std::size_t(0), std::size_t(3), std::size_t(12), std::size_t(71),
                             bytes.size() / 2, bytes.size() - 1}) {
        try {
            parse_frozen(bytes.data(), keep);
            FAIL() << "expected an error for length " << keep;
        } catch (const Error& e) {
            EXPECT_TRUE(e.code() == Errc::corrupt_index || e.code() == Errc::io_error)
                << to_string(e.code());
        }
    }
}

TEST(Io, BadMagic)
{
    FrozenGrid g = freeze(SparseGridBuilder({8, 8, 8}, 0.0f));
    std::vector<std::uint8_t> bytes = serialize_frozen(g);
    std::memcpy(bytes.data(), "XXXX", 4);
    try {
        parse_frozen(bytes.data(), bytes.size());
        FAIL() << "expected BadMagic";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::bad_magic);
    }
}

TEST(Io, VersionMismatch)
{
    FrozenGrid g = freeze(SparseGridBuilder({8, 8, 8}, 0.0f));
    std::vector<std::uint8_t> bytes = serialize_frozen(g);
    std::uint32_t bad_version = 999;
    std::memcpy(bytes.data() + 4, &bad_version, 4);
    try {
        parse_frozen(bytes.data(), bytes.size());
        FAIL() << "expected VersionMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::version_mismatch);
    }
}

TEST(Io, CorruptChildIndex)
{
    SparseGridBuilder b({32, 32, 32}, 0.0f);
    b.set_voxel({0, 0, 0}, 1.0f);
    FrozenGrid g = freeze(b);
    ASSERT_EQ(g.uppers.size(), 1u);
    ASSERT_EQ(g.lowers.size(), 1u);

    // point the upper node's child slot beyond the lower array
    std::vector<std::uint8_t> bytes = serialize_frozen(g);
    std::size_t upper_payload = FrozenLayout::header_bytes
                                + FrozenLayout::root_entry_bytes * g.root.size() + 16;
    std::uint32_t bogus = 7;
    std::memcpy(bytes.data() + upper_payload, &bogus, 4);
    try {
        parse_frozen(bytes.data(), bytes.size());
        FAIL() << "expected CorruptIndex";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::corrupt_index);
    }
}

TEST(Io, ByteSizeMatchesLayoutFormula)
{
    for (const FrozenGrid& g : sample_grids()) {
        auto bytes = serialize_frozen(g);
        EXPECT_EQ(bytes.size(), FrozenLayout::total_bytes(g.uppers.size(), g.lowers.size(),
                                                          g.leaves.size(), g.root.size()));
    }
}
