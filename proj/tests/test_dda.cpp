// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include <svdb/dda.hpp>
#include <svdb/rng.hpp>

#include "oracles.hpp"

using namespace svdb;
namespace oracle = testing_oracles;

namespace {

MacrocellGrid make_grid(Coord vol_dims)
{
    MacrocellGrid mc;
    mc.vol_dims = vol_dims;
    mc.cells = MacrocellGrid::cell_counts_for(vol_dims);
    std::size_t n = mc.cell_count();
    mc.cell_min.assign(n, 0.0f);
    mc.cell_max.assign(n, 0.0f);
    mc.majorant.assign(n, 0.0f);
    mc.empty.assign(n, 1);
    return mc;
}

struct Visit {
    Vec3i cell;
    double t_enter;
    double t_exit;
};

std::vector<Visit> collect(const MacrocellGrid& mc, const Ray& ray, double t0, double t1)
{
    std::vector<Visit> visits;
    dda_traverse(mc, ray, t0, t1, [&](const Vec3i& c, double ta, double tb) {
        visits.push_back({c, ta, tb});
        return true;
    });
    return visits;
}

/// World box of one cell, clipped to the grid box (independent of dda.hpp).
void cell_world_box(const MacrocellGrid& mc, const Vec3i& c, Vec3d& lo, Vec3d& hi)
{
    lo = {32.0 * c.x, 32.0 * c.y, 32.0 * c.z};
    hi = {std::min(32.0 * (c.x + 1), double(mc.vol_dims.x - 1)),
          std::min(32.0 * (c.y + 1), double(mc.vol_dims.y - 1)),
          std::min(32.0 * (c.z + 1), double(mc.vol_dims.z - 1))};
}

} // namespace

TEST(Dda, AxisAlignedRowVisit)
{
    MacrocellGrid mc = make_grid({65, 65, 65}); // 2x2x2 cells
    Ray ray{{-5.0, 4.0, 4.0}, {1.0, 0.0, 0.0}};
    auto visits = collect(mc, ray, 0.0, 1e30);
    ASSERT_EQ(visits.size(), 2u);
    EXPECT_EQ(visits[0].cell, (Vec3i{0, 0, 0}));
    EXPECT_EQ(visits[1].cell, (Vec3i{1, 0, 0}));
    EXPECT_DOUBLE_EQ(visits[0].t_enter, 5.0);
    EXPECT_DOUBLE_EQ(visits[0].t_exit, 37.0);
    EXPECT_DOUBLE_EQ(visits[1].t_exit, 69.0);
}

TEST(Dda, MissingRayVisitsNothing)
{
    MacrocellGrid mc = make_grid({64, 64, 64});
    Ray ray{{-10.0, -10.0, -10.0}, {0.0, 0.0, 1.0}};
    EXPECT_TRUE(collect(mc, ray, 0.0, 1e30).empty());
}

TEST(Dda, EarlyTermination)
{
    MacrocellGrid mc = make_grid({129, 65, 65});
    Ray ray{{-1.0, 10.0, 10.0}, {1.0, 0.0, 0.0}};
    int count = 0;
    dda_traverse(mc, ray, 0.0, 1e30, [&](const Vec3i&, double, double) {
        ++count;
        return count < 2;
    });
    EXPECT_EQ(count, 2);
}

TEST(Dda, RandomRaysMatchBruteForceOracle)
{
    Rng rng(10101);
    std::vector<Coord> grids = {{65, 65, 65}, {129, 97, 161}, {40, 200, 75}, {33, 33, 33}};
    for (const Coord& dims : grids) {
        MacrocellGrid mc = make_grid(dims);
        Vec3d box_hi = mc.world_max();

        for (int i = 0; i < 2500; ++i) {
            Vec3d o{rng.uniform() * 300.0 - 80.0, rng.uniform() * 300.0 - 80.0,
                    rng.uniform() * 300.0 - 80.0};
            Vec3d d{rng.uniform() * 2.0 - 1.0, rng.uniform() * 2.0 - 1.0,
                    rng.uniform() * 2.0 - 1.0};
            if (i % 7 == 0)
                d.x = 0.0; // exercise parallel-to-slab cases
            if (i % 11 == 0)
                d.y = 0.0;
            if (length(d) < 1e-6)
                continue;
            d = normalize(d);
            Ray ray{o, d};

            auto visits = collect(mc, ray, 0.0, 1e30);

            // segment inside the grid box, via the independent slab test
            double seg0 = 0.0, seg1 = 1e30;
            bool hits = oracle::ray_box_overlap(o, d, {0, 0, 0}, box_hi, seg0, seg1);
            if (!hits) {
                EXPECT_TRUE(visits.empty());
                continue;
            }

            // intervals must tile [seg0, seg1] exactly, in order
            ASSERT_FALSE(visits.empty());
            EXPECT_NEAR(visits.front().t_enter, seg0, 1e-9 * std::max(1.0, std::abs(seg0)));
            EXPECT_NEAR(visits.back().t_exit, seg1, 1e-9 * std::max(1.0, std::abs(seg1)));
            for (std::size_t k = 0; k < visits.size(); ++k) {
                ASSERT_LE(visits[k].t_enter, visits[k].t_exit + 1e-12);
                if (k > 0)
                    ASSERT_EQ(visits[k].t_enter, visits[k - 1].t_exit); // shared endpoints
            }

            // visited set vs brute force per-cell box intersection
            std::map<std::tuple<int, int, int>, double> visited; // cell -> interval length
            for (const Visit& vi : visits) {
                auto [it, fresh] = visited.insert({{vi.cell.x, vi.cell.y, vi.cell.z},
                                                   vi.t_exit - vi.t_enter});
                ASSERT_TRUE(fresh); // no cell visited twice
            }

            for (int cz = 0; cz < mc.cells.z; ++cz)
                for (int cy = 0; cy < mc.cells.y; ++cy)
                    for (int cx = 0; cx < mc.cells.x; ++cx) {
                        Vec3d lo, hi;
                        cell_world_box(mc, {cx, cy, cz}, lo, hi);
                        double c0 = seg0, c1 = seg1;
                        bool overlap = oracle::ray_box_overlap(o, d, lo, hi, c0, c1);
                        auto it = visited.find({cx, cy, cz});
                        if (overlap && c1 - c0 > 1e-7)
                            ASSERT_TRUE(it != visited.end())
                                << "missed cell " << cx << "," << cy << "," << cz;
                        // grazing hits may go either way; anything with real
                        // length must be backed by a real overlap
                        if (!overlap && it != visited.end())
                            ASSERT_LE(it->second, 1e-7)
                                << "phantom cell " << cx << "," << cy << "," << cz;
                    }
        }
    }
}
