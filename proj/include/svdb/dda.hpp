// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "svdb/macrocell.hpp"
#include "svdb/vec.hpp"

namespace svdb {

struct Ray {
    Vec3d origin;
    Vec3d dir;

    Vec3d at(double t) const { return origin + dir * t; }
};

/// Clips [t0, t1] against an axis-aligned box. Returns false when the
/// intersection is empty. Zero direction components are handled by the
/// inf/nan-free slab test.
inline bool clip_ray_box(const Ray& ray, const Vec3d& box_lo, const Vec3d& box_hi, double& t0,
                         double& t1)
{
    for (int a = 0; a < 3; ++a) {
        double o = ray.origin[a], d = ray.dir[a];
        if (d == 0.0) {
            if (o < box_lo[a] || o > box_hi[a])
                return false;
            continue;
        }
        double inv = 1.0 / d;
        double ta = (box_lo[a] - o) * inv;
        double tb = (box_hi[a] - o) * inv;
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1)
            return false;
    }
    return true;
}

/// Amanatides & Woo incremental traversal over the macrocell grid. Visits
/// every cell pierced by the ray segment in increasing t. The visitor gets
/// (cell, t_enter, t_exit) with intervals that tile the clipped segment
/// exactly (each exit is the next entry); returning false stops traversal.
template <typename Visitor>
inline void dda_traverse(const MacrocellGrid& mc, const Ray& ray, double t0, double t1,
                         Visitor&& visit)
{
    constexpr double cell = double(MacrocellGrid::cell_dim);
    Vec3d box_lo{0.0, 0.0, 0.0};
    Vec3d box_hi = mc.world_max();

    if (!clip_ray_box(ray, box_lo, box_hi, t0, t1))
        return;
    if (!(t0 <= t1))
        return;

    Vec3d entry = ray.at(t0);
    Vec3i c{int(std::clamp(std::floor(entry.x / cell), 0.0, double(mc.cells.x - 1))),
            int(std::clamp(std::floor(entry.y / cell), 0.0, double(mc.cells.y - 1))),
            int(std::clamp(std::floor(entry.z / cell), 0.0, double(mc.cells.z - 1)))};

    Vec3i step{0, 0, 0};
    Vec3d t_next{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
    Vec3d t_delta = t_next;

    for (int a = 0; a < 3; ++a) {
        double d = ray.dir[a];
        if (d > 0.0) {
            step[a] = 1;
            t_next[a] = (double(c[a] + 1) * cell - ray.origin[a]) / d;
            t_delta[a] = cell / d;
        } else if (d < 0.0) {
            step[a] = -1;
            t_next[a] = (double(c[a]) * cell - ray.origin[a]) / d;
            t_delta[a] = -cell / d;
        }
    }

    double t_cur = t0;
    for (;;) {
        int axis = 0;
        if (t_next.y < t_next[axis])
            axis = 1;
        if (t_next.z < t_next[axis])
            axis = 2;
        double t_exit = std::min(t_next[axis], t1);
        t_exit = std::max(t_exit, t_cur); // guard against fp jitter at the entry plane

        if (!visit(c, t_cur, t_exit))
            return;
        if (t_exit >= t1)
            return;

        t_cur = t_exit;
        c[axis] += step[axis];
        if (c[axis] < 0 || c[axis] >= mc.cells[axis])
            return;
        t_next[axis] += t_delta[axis];
    }
}

} // namespace svdb
