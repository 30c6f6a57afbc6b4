// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/frozen.hpp"
#include "svdb/parallel.hpp"
#include "svdb/volume.hpp"

namespace svdb {

/// Mean squared error between the decoded grid and the reference volume at
/// voxel centers (no interpolation): lossless means exact value recovery.
/// Accumulation is double precision over fixed z-slabs, combined in slab
/// order, so the result does not depend on the worker count.
inline double mse(const FrozenGrid& g, const DenseVolume& v)
{
    if (g.dims != v.dims())
        fail(Errc::dims_mismatch, "grid and volume dims differ");

    Coord dims = v.dims();
    constexpr int slab = 8;
    std::int64_t num_slabs = (dims.z + slab - 1) / slab;
    std::vector<double> partial(std::size_t(num_slabs), 0.0);

    parallel_for(num_slabs, [&](std::int64_t s) {
        Accessor acc(g);
        double sum = 0.0;
        int z_end = std::min(int(s + 1) * slab, dims.z);
        for (int z = int(s) * slab; z < z_end; ++z)
            for (int y = 0; y < dims.y; ++y)
                for (int x = 0; x < dims.x; ++x) {
                    double d = double(acc.read({x, y, z})) - double(v.at(x, y, z));
                    sum += d * d;
                }
        partial[std::size_t(s)] = sum;
    });

    double total = 0.0;
    for (double p : partial)
        total += p;
    return total / double(DenseVolume::voxel_count(dims));
}

/// 10*log10(peak^2/mse) in dB; +infinity when mse is zero (lossless). peak is
/// the reference volume's value range (max - min).
inline double psnr(double mse_value, double peak)
{
    if (mse_value == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse_value);
}

struct SizeReport {
    std::uint64_t frozen_bytes = 0;
    std::uint64_t dense_bytes = 0;
    double ratio = 0.0;
};

inline SizeReport size_report(const FrozenGrid& g, const DenseVolume& v)
{
    SizeReport r;
    r.frozen_bytes = g.byte_size();
    r.dense_bytes = DenseVolume::voxel_count(v.dims()) * 4;
    r.ratio = double(r.frozen_bytes) / double(r.dense_bytes);
    return r;
}

// CSV rows for sweep runs: '.' decimal separator, "inf" for infinite PSNR.

inline void write_csv_header(std::ostream& os)
{
    os << "quality,metric,mse,psnr,frozen_bytes,ratio\n";
}

inline void write_csv_row(std::ostream& os, double quality, const char* metric, double mse_value,
                          double psnr_value, std::uint64_t frozen_bytes, double ratio)
{
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%g,%s,%.17g,%.17g,%llu,%.17g\n", quality, metric, mse_value,
                  psnr_value, static_cast<unsigned long long>(frozen_bytes), ratio);
    os << buf;
}

} // namespace svdb
