// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/vec.hpp"

namespace svdb {

enum class VoxelType : std::uint32_t {
    u8 = 0,
    f32 = 1,
};

inline const char* to_string(VoxelType t)
{
    return t == VoxelType::u8 ? "u8" : "f32";
}

inline std::size_t bytes_per_voxel(VoxelType t)
{
    return t == VoxelType::u8 ? 1 : 4;
}

/// Dense structured-regular scalar grid. Values are stored x-fastest
/// (index = x + W*(y + H*z)). 8-bit sources are mapped to [0,1] with v/255 at
/// load time; after that everything is float.
class DenseVolume {
public:
    DenseVolume() = default;

    static DenseVolume from_data(Coord dims, std::vector<float> data,
                                 VoxelType source_type = VoxelType::f32)
    {
        if (dims.x < 1 || dims.y < 1 || dims.z < 1)
            fail(Errc::size_mismatch, "volume dims must be positive");
        std::uint64_t n = voxel_count(dims);
        if (data.size() != n)
            fail(Errc::size_mismatch, "data length does not match dims");

        DenseVolume v;
        v.dims_ = dims;
        v.type_ = source_type;
        v.data_ = std::move(data);
        v.min_ = std::numeric_limits<float>::infinity();
        v.max_ = -std::numeric_limits<float>::infinity();
        for (float& s : v.data_) {
            if (!std::isfinite(s))
                fail(Errc::non_finite_voxel, "volume contains NaN or Inf");
            if (s == 0.0f)
                s = 0.0f; // normalize -0 so exact-value bookkeeping has one zero
            v.min_ = std::min(v.min_, s);
            v.max_ = std::max(v.max_, s);
        }
        return v;
    }

    /// Reads a headerless little-endian raw file. dims and voxel type are
    /// supplied out of band; the file length must match exactly.
    static DenseVolume load_raw(const std::filesystem::path& path, Coord dims, VoxelType type)
    {
        if (dims.x < 1 || dims.y < 1 || dims.z < 1)
            fail(Errc::size_mismatch, "volume dims must be positive");

        std::error_code ec;
        std::uintmax_t actual = std::filesystem::file_size(path, ec);
        if (ec)
            fail(Errc::io_error, "cannot stat " + path.string() + ": " + ec.message());
        std::uint64_t n = voxel_count(dims);
        std::uint64_t expected = n * bytes_per_voxel(type);
        if (actual != expected)
            fail(Errc::size_mismatch, path.string() + ": expected " + std::to_string(expected)
                                          + " bytes, file has " + std::to_string(actual));

        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(Errc::io_error, "cannot open " + path.string());

        std::vector<float> data(n);
        if (type == VoxelType::u8) {
            std::vector<unsigned char> raw(n);
            in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(n));
            if (!in)
                fail(Errc::io_error, "short read from " + path.string());
            for (std::uint64_t i = 0; i < n; ++i)
                data[i] = float(raw[i]) / 255.0f; // 255 -> exactly 1.0
        } else {
            static_assert(sizeof(float) == 4);
            in.read(reinterpret_cast<char*>(data.data()), std::streamsize(n * 4));
            if (!in)
                fail(Errc::io_error, "short read from " + path.string());
        }
        return from_data(dims, std::move(data), type);
    }

    Coord dims() const { return dims_; }
    VoxelType voxel_type() const { return type_; }
    float min_value() const { return min_; }
    float max_value() const { return max_; }
    std::uint64_t size() const { return data_.size(); }
    const std::vector<float>& data() const { return data_; }

    std::uint64_t index(int x, int y, int z) const
    {
        return std::uint64_t(x)
               + std::uint64_t(dims_.x) * (std::uint64_t(y) + std::uint64_t(dims_.y) * std::uint64_t(z));
    }

    float at(int x, int y, int z) const { return data_[index(x, y, z)]; }
    float at(const Coord& c) const { return at(c.x, c.y, c.z); }

    bool contains(const Coord& c) const
    {
        return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_.x && c.y < dims_.y && c.z < dims_.z;
    }

    /// Exact min/max over the half-open box [lo, hi).
    std::pair<float, float> value_range(Coord lo, Coord hi) const
    {
        Box3i box = Box3i::intersect({lo, hi}, {{0, 0, 0}, dims_});
        if (box.empty())
            fail(Errc::empty_box, "value_range box has zero volume");
        float mn = std::numeric_limits<float>::infinity();
        float mx = -std::numeric_limits<float>::infinity();
        for (int z = box.lo.z; z < box.hi.z; ++z)
            for (int y = box.lo.y; y < box.hi.y; ++y) {
                const float* row = data_.data() + index(box.lo.x, y, z);
                for (int x = 0; x < box.hi.x - box.lo.x; ++x) {
                    mn = std::min(mn, row[x]);
                    mx = std::max(mx, row[x]);
                }
            }
        return {mn, mx};
    }

    static std::uint64_t voxel_count(Coord dims)
    {
        return std::uint64_t(dims.x) * std::uint64_t(dims.y) * std::uint64_t(dims.z);
    }

private:
    Coord dims_{0, 0, 0};
    VoxelType type_ = VoxelType::f32;
    std::vector<float> data_;
    float min_ = 0.0f;
    float max_ = 0.0f;
};

struct Histogram {
    int bin_count = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;

    /// floor((v-lo)/(hi-lo)*bin_count) clamped to [0, bin_count-1]; a
    /// degenerate domain puts everything in bin 0.
    int bin_of(double v) const
    {
        if (hi <= lo)
            return 0;
        int b = int(std::floor((v - lo) / (hi - lo) * double(bin_count)));
        return std::clamp(b, 0, bin_count - 1);
    }
};

inline Histogram compute_histogram(const DenseVolume& v, int bin_count)
{
    if (bin_count < 1)
        fail(Errc::size_mismatch, "histogram bin_count must be >= 1");
    Histogram h;
    h.bin_count = bin_count;
    h.lo = v.min_value();
    h.hi = v.max_value();
    h.counts.assign(std::size_t(bin_count), 0);
    for (float s : v.data())
        ++h.counts[std::size_t(h.bin_of(s))];
    return h;
}

struct BackgroundValue {
    float value = 0.0f;
    int source_bin = 0;
};

/// The histogram mode, resolved to an exact data value: take the argmax bin
/// (lowest index on ties), then the most frequent exact value inside that bin
/// (smallest value on ties). Deterministic for a given volume.
inline BackgroundValue detect_background(const DenseVolume& v, const Histogram& h)
{
    int best_bin = 0;
    for (int b = 1; b < h.bin_count; ++b)
        if (h.counts[std::size_t(b)] > h.counts[std::size_t(best_bin)])
            best_bin = b;

    std::unordered_map<float, std::uint64_t> exact;
    for (float s : v.data())
        if (h.bin_of(s) == best_bin)
            ++exact[s];

    bool have = false;
    float best_value = 0.0f;
    std::uint64_t best_count = 0;
    for (const auto& [value, count] : exact) {
        if (!have || count > best_count || (count == best_count && value < best_value)) {
            have = true;
            best_value = value;
            best_count = count;
        }
    }
    return {best_value, best_bin};
}

} // namespace svdb
