// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "svdb/errors.hpp"
#include "svdb/vec.hpp"

namespace svdb {

/// RGBA transfer function, piecewise linear over the normalized scalar
/// (v - lo)/(hi - lo) clamped to [0,1], with entries spaced evenly. The alpha
/// channel acts as the extinction coefficient (scaled by density_scale).
class TransferFunction {
public:
    TransferFunction(double domain_lo, double domain_hi, std::vector<std::array<float, 4>> entries,
                     double density_scale = 1.0)
        : lo_(domain_lo), hi_(domain_hi), scale_(density_scale), entries_(std::move(entries))
    {
        if (!(hi_ > lo_))
            fail(Errc::size_mismatch, "transfer function domain must have hi > lo");
        if (entries_.size() < 2)
            fail(Errc::size_mismatch, "transfer function needs at least 2 entries");
        if (!(scale_ > 0.0) || !std::isfinite(scale_))
            fail(Errc::size_mismatch, "density_scale must be positive");
        for (const auto& e : entries_)
            if (!(e[3] >= 0.0f && e[3] <= 1.0f))
                fail(Errc::size_mismatch, "transfer function alpha must be in [0,1]");
    }

    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    double density_scale() const { return scale_; }
    const std::vector<std::array<float, 4>>& entries() const { return entries_; }

    double normalized(double v) const { return std::clamp((v - lo_) / (hi_ - lo_), 0.0, 1.0); }

    std::array<double, 4> lookup(double v) const
    {
        double u = normalized(v) * double(entries_.size() - 1);
        std::size_t i0 = std::min(std::size_t(u), entries_.size() - 2);
        double t = u - double(i0);
        const auto& a = entries_[i0];
        const auto& b = entries_[i0 + 1];
        return {(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1],
                (1.0 - t) * a[2] + t * b[2], (1.0 - t) * a[3] + t * b[3]};
    }

    Vec3f rgb(double v) const
    {
        auto c = lookup(v);
        return {float(c[0]), float(c[1]), float(c[2])};
    }

    double alpha(double v) const { return lookup(v)[3]; }

    /// Extinction at scalar v: density_scale * alpha.
    double extinction(double v) const { return scale_ * alpha(v); }

    /// Exact maximum of alpha over the scalar interval [vlo, vhi]: the
    /// piecewise-linear maximum is attained at an interval endpoint or at a
    /// control point strictly inside, so no sampling is involved.
    double max_alpha_in_range(double vlo, double vhi) const
    {
        if (vhi < vlo)
            std::swap(vlo, vhi);
        double m = std::max(alpha(vlo), alpha(vhi));
        double ulo = normalized(vlo), uhi = normalized(vhi);
        std::size_t n = entries_.size();
        for (std::size_t i = 0; i < n; ++i) {
            double u = double(i) / double(n - 1);
            if (u > ulo && u < uhi)
                m = std::max(m, double(entries_[i][3]));
        }
        return m;
    }

    /// Majorant extinction over a scalar range.
    double max_extinction_in_range(double vlo, double vhi) const
    {
        return scale_ * max_alpha_in_range(vlo, vhi);
    }

private:
    double lo_;
    double hi_;
    double scale_;
    std::vector<std::array<float, 4>> entries_;
};

} // namespace svdb
