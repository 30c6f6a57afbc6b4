// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include <svdb/compress.hpp>
#include <svdb/render.hpp>
#include <svdb/synth.hpp>

#include "oracles.hpp"

using namespace svdb;
namespace oracle = testing_oracles;

namespace {

/// Grid that reads 1.0 everywhere (background = 1), for homogeneous-medium
/// statistics.
FrozenGrid unit_grid(Coord dims = {16, 16, 16})
{
    return freeze(SparseGridBuilder(dims, 1.0f));
}

TransferFunction constant_alpha_tf(float alpha, float albedo = 1.0f, double scale = 1.0)
{
    return TransferFunction(0.0, 2.0,
                            {{{albedo, albedo, albedo, alpha}}, {{albedo, albedo, albedo, alpha}}},
                            scale);
}

} // namespace

TEST(Woodcock, FreeFlightMeanIsUnitAtUnitExtinction)
{
    FrozenGrid g = unit_grid();
    GridField field(g);
    TransferFunction tf = constant_alpha_tf(1.0f);
    Ray ray{{2.0, 8.0, 8.0}, {1.0, 0.0, 0.0}};

    Rng rng(12345);
    const int n = 1000000;
    double sum = 0.0;
    int accepted = 0;
    for (int i = 0; i < n; ++i) {
        auto event = woodcock_track(field, tf, 1.0, ray, 0.0, 50.0, rng);
        if (event) {
            sum += event->t;
            ++accepted;
        }
    }
    ASSERT_GT(accepted, n - 5); // interval of 50 mean free paths: escapes are ~e^-50
    double mean = sum / double(accepted);
    EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(Woodcock, ZeroExtinctionNeverAccepts)
{
    FrozenGrid g = unit_grid();
    GridField field(g);
    TransferFunction tf = constant_alpha_tf(0.0f); // alpha 0 but majorant forced positive
    Ray ray{{2.0, 8.0, 8.0}, {1.0, 0.0, 0.0}};
    Rng rng(3);
    for (int i = 0; i < 10000; ++i)
        EXPECT_FALSE(woodcock_track(field, tf, 1.0, ray, 0.0, 4.0, rng).has_value());
}

TEST(Woodcock, ZeroMajorantDrawsNothing)
{
    FrozenGrid g = unit_grid();
    GridField field(g);
    TransferFunction tf = constant_alpha_tf(1.0f);
    Ray ray{{2.0, 8.0, 8.0}, {1.0, 0.0, 0.0}};
    Rng a(42), b(42);
    EXPECT_FALSE(woodcock_track(field, tf, 0.0, ray, 0.0, 10.0, a).has_value());
    EXPECT_EQ(a.next_u64(), b.next_u64()); // identical stream position: no draws happened
}

TEST(Woodcock, FreeFlightDistancesPassKsAgainstExponential)
{
    FrozenGrid g = unit_grid();
    GridField field(g);
    TransferFunction tf = constant_alpha_tf(1.0f);
    Ray ray{{2.0, 8.0, 8.0}, {1.0, 0.0, 0.0}};

    Rng rng(777);
    const int n = 100000;
    std::vector<double> samples;
    samples.reserve(n);
    while (int(samples.size()) < n) {
        auto event = woodcock_track(field, tf, 1.0, ray, 0.0, 80.0, rng);
        if (event)
            samples.push_back(event->t);
    }
    std::sort(samples.begin(), samples.end());
    double d_stat = 0.0;
    for (int i = 0; i < n; ++i) {
        double cdf = 1.0 - std::exp(-samples[std::size_t(i)]);
        d_stat = std::max(d_stat, std::abs(cdf - double(i) / n));
        d_stat = std::max(d_stat, std::abs(cdf - double(i + 1) / n));
    }
    double critical_1pct = 1.6276 / std::sqrt(double(n));
    EXPECT_LT(d_stat, critical_1pct);
}

TEST(Woodcock, UnitSlabTransmittanceIsBeerLambert)
{
    FrozenGrid g = unit_grid();
    GridField field(g);
    TransferFunction tf = constant_alpha_tf(1.0f);
    Ray ray{{2.0, 8.0, 8.0}, {1.0, 0.0, 0.0}};

    Rng rng(2718);
    const int n = 1000000;
    int escaped = 0;
    for (int i = 0; i < n; ++i)
        if (!woodcock_track(field, tf, 1.0, ray, 0.0, 1.0, rng).has_value())
            ++escaped;
    double expected = std::exp(-1.0);
    double se = std::sqrt(expected * (1.0 - expected) / double(n));
    EXPECT_NEAR(double(escaped) / n, expected, 3.0 * se);
}

TEST(TracePath, EmptySceneIsAmbientEverywhere)
{
    FrozenGrid g = freeze(SparseGridBuilder({64, 64, 64}, 0.0f));
    TransferFunction tf(0.0, 1.0, {{{1, 1, 1, 0}}, {{1, 1, 1, 1}}}, 2.0); // alpha(B)=0
    Camera cam;
    cam.position = {31.5, 31.5, -150.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 24;
    cam.height = 24;
    RenderSettings rs;
    rs.spp = 8;
    rs.ambient_radiance = {1.0f, 1.0f, 1.0f};
    Image img = render(g, tf, cam, rs);
    for (const Vec3f& px : img.pixels) {
        EXPECT_EQ(px.x, 1.0f);
        EXPECT_EQ(px.y, 1.0f);
        EXPECT_EQ(px.z, 1.0f);
    }
}

TEST(TracePath, ZeroAlbedoDenseMediumIsBlack)
{
    FrozenGrid g = freeze(SparseGridBuilder({64, 64, 64}, 1.0f)); // field = 1 everywhere
    TransferFunction tf(0.0, 1.0, {{{0, 0, 0, 1}}, {{0, 0, 0, 1}}}, 50.0); // opaque, black
    Camera cam;
    cam.position = {31.5, 31.5, -150.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.fov_y_deg = 15.0; // narrow enough that every pixel ray enters the box
    cam.width = 16;
    cam.height = 16;
    RenderSettings rs;
    rs.spp = 16;
    rs.seed = 5;
    Image img = render(g, tf, cam, rs);
    double mean = 0.0;
    for (const Vec3f& px : img.pixels)
        mean += px.x + px.y + px.z;
    mean /= double(img.pixels.size()) * 3.0;
    EXPECT_LT(mean, 1e-12);
}

// Independent reference for a homogeneous cube medium: pure exponential
// free-flight sampling against the analytic cube geometry, no grids, no DDA,
// no transfer function machinery.
namespace {

struct CubeReference {
    Vec3d lo, hi;
    double sigma_t;
    double albedo;
    int max_bounces;
    int rr_start;

    double trace(Ray ray, Rng& rng) const
    {
        double throughput = 1.0;
        int bounces = 0;
        for (;;) {
            double t0 = 0.0, t1 = 1e30;
            if (!oracle::ray_box_overlap(ray.origin, ray.dir, lo, hi, t0, t1) || t1 <= 0.0)
                return throughput; // ambient = 1
            t0 = std::max(t0, 0.0);
            double flight = -std::log(1.0 - rng.uniform()) / sigma_t;
            if (t0 + flight >= t1) {
                // there may be more medium after re-entry, but a convex box
                // has a single interval, so this is an escape
                return throughput;
            }
            if (++bounces > max_bounces)
                return 0.0;
            throughput *= albedo;
            ray = Ray{ray.at(t0 + flight), Vec3d{}};
            double z = 1.0 - 2.0 * rng.uniform();
            double phi = 2.0 * M_PI * rng.uniform();
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            ray.dir = {r * std::cos(phi), r * std::sin(phi), z};
            if (bounces >= rr_start) {
                double survive = std::clamp(throughput, 0.05, 0.95);
                if (rng.uniform() >= survive)
                    return 0.0;
                throughput /= survive;
            }
        }
    }
};

} // namespace

TEST(TracePath, MatchesIndependentHomogeneousReference)
{
    // whole volume constant 1 => sharp box medium [0, 31]^3 with sigma_t = 0.06
    const Coord dims{32, 32, 32};
    FrozenGrid g = freeze(SparseGridBuilder(dims, 1.0f));
    const double sigma = 0.06;
    const float albedo = 0.9f;
    TransferFunction tf = constant_alpha_tf(1.0f, albedo, sigma);
    MacrocellGrid mc = build_macrocells(g);
    update_majorants(mc, tf);

    Camera cam;
    cam.position = {15.5, 15.5, -90.0};
    cam.look_at = {15.5, 15.5, 15.5};
    cam.fov_y_deg = 25.0;
    cam.width = 48;
    cam.height = 48;
    RenderSettings rs;
    rs.spp = 256;
    rs.seed = 99;
    rs.max_bounces = 64;
    rs.rr_start_bounce = 3;

    Image img = render_field(GridField(g), mc, tf, cam, rs);
    double ours = 0.0;
    for (const Vec3f& px : img.pixels)
        ours += px.x;
    ours /= double(img.pixels.size());

    CubeReference ref{{0, 0, 0}, {31, 31, 31}, sigma, albedo, rs.max_bounces, rs.rr_start_bounce};
    Rng ref_rng(4242);
    double ref_sum = 0.0, ref_sq = 0.0;
    const int ref_n = 400000;
    std::vector<double> pixel_luma;
    for (int i = 0; i < ref_n; ++i) {
        int px = int(ref_rng.uniform() * cam.width);
        int py = int(ref_rng.uniform() * cam.height);
        Ray ray{cam.position, Vec3d{}};
        // same pinhole mapping, rebuilt locally
        double tan_half = std::tan(cam.fov_y_deg * M_PI / 360.0);
        double ndc_x = (2.0 * (px + ref_rng.uniform()) / cam.width - 1.0) * tan_half;
        double ndc_y = 1.0 - 2.0 * (py + ref_rng.uniform()) / cam.height;
        Vec3d fwd{0, 0, 1};
        ray.dir = normalize(fwd + Vec3d{ndc_x, ndc_y * tan_half, 0.0} * 1.0);
        double L = ref.trace(ray, ref_rng);
        ref_sum += L;
        ref_sq += L * L;
    }
    double ref_mean = ref_sum / ref_n;
    double ref_var = std::max(0.0, ref_sq / ref_n - ref_mean * ref_mean);
    double ref_se = std::sqrt(ref_var / ref_n);

    // our renderer's own error is comparable; use a combined allowance
    EXPECT_NEAR(ours, ref_mean, 3.0 * ref_se + 0.004)
        << "ours " << ours << " ref " << ref_mean << " se " << ref_se;
}

TEST(TracePath, EnergyBoundedByAmbient)
{
    DenseVolume v = synth_blobs({64, 64, 64}, 3);
    auto [g, report] = compress(v, CompressionParams{});
    TransferFunction tf(0.0, double(v.max_value()),
                        {{{0.9f, 0.8f, 0.7f, 0.0f}}, {{0.8f, 0.9f, 0.9f, 0.9f}}}, 4.0);
    Camera cam;
    cam.position = {31.5, 31.5, -130.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 32;
    cam.height = 32;
    RenderSettings rs;
    rs.spp = 32;
    rs.seed = 8;
    rs.ambient_radiance = {1.0f, 1.0f, 1.0f};
    Image img = render(g, tf, cam, rs);
    for (const Vec3f& px : img.pixels) {
        ASSERT_LE(px.x, 1.0f);
        ASSERT_LE(px.y, 1.0f);
        ASSERT_LE(px.z, 1.0f);
    }
}

TEST(Render, DeterministicAcrossRunsAndThreads)
{
    DenseVolume v = synth_blobs({64, 64, 64}, 9);
    auto [g, report] = compress(v, CompressionParams{});
    TransferFunction tf(0.0, double(v.max_value()),
                        {{{0.2f, 0.4f, 0.9f, 0.0f}}, {{0.9f, 0.6f, 0.1f, 0.7f}}}, 3.0);
    Camera cam;
    cam.position = {31.5, 31.5, -120.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 48;
    cam.height = 48;
    RenderSettings rs;
    rs.spp = 8;
    rs.seed = 21;

    rs.threads = 1;
    Image a = render(g, tf, cam, rs);
    Image b = render(g, tf, cam, rs);
    rs.threads = 4;
    Image c = render(g, tf, cam, rs);

    ASSERT_EQ(a.pixels.size(), b.pixels.size());
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        ASSERT_EQ(a.pixels[i], b.pixels[i]);
        ASSERT_EQ(a.pixels[i], c.pixels[i]);
    }
}

TEST(Render, EmptyFlagChangesNoPixel)
{
    DenseVolume v = synth_blobs({64, 64, 64}, 13);
    auto [g, report] = compress(v, CompressionParams{});
    TransferFunction tf(0.0, double(v.max_value()),
                        {{{0.5f, 0.5f, 0.5f, 0.0f}}, {{0.9f, 0.9f, 0.9f, 0.8f}}}, 2.0);
    MacrocellGrid mc = build_macrocells(g);
    update_majorants(mc, tf);

    Camera cam;
    cam.position = {31.5, 31.5, -120.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 32;
    cam.height = 32;
    RenderSettings rs;
    rs.spp = 8;
    rs.seed = 77;

    Image with_flag = render_field(GridField(g), mc, tf, cam, rs);
    MacrocellGrid no_flag = mc;
    std::fill(no_flag.empty.begin(), no_flag.empty.end(), std::uint8_t(0));
    Image without_flag = render_field(GridField(g), no_flag, tf, cam, rs);
    for (std::size_t i = 0; i < with_flag.pixels.size(); ++i)
        ASSERT_EQ(with_flag.pixels[i], without_flag.pixels[i]);
}

TEST(Render, SppInvariantOnEmptyScene)
{
    FrozenGrid g = freeze(SparseGridBuilder({64, 64, 64}, 0.0f));
    TransferFunction tf(0.0, 1.0, {{{1, 1, 1, 0}}, {{1, 1, 1, 1}}}, 1.0);
    Camera cam;
    cam.position = {31.5, 31.5, -140.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 16;
    cam.height = 16;
    RenderSettings rs;
    rs.seed = 1;
    rs.spp = 1;
    Image one = render(g, tf, cam, rs);
    rs.spp = 64;
    Image many = render(g, tf, cam, rs);
    for (std::size_t i = 0; i < one.pixels.size(); ++i)
        ASSERT_EQ(one.pixels[i], many.pixels[i]);
}

TEST(Render, DenseFieldSubstitutionIsPixelIdentical)
{
    DenseVolume v = synth_blobs({64, 64, 64}, 17, 7);
    auto [g, report] = compress(v, CompressionParams{}); // q = 1: exact values
    TransferFunction tf(0.0, double(v.max_value()),
                        {{{0.3f, 0.7f, 0.9f, 0.0f}}, {{0.9f, 0.4f, 0.2f, 0.85f}}}, 3.0);
    MacrocellGrid mc = build_macrocells(g);
    update_majorants(mc, tf);

    Camera cam;
    cam.position = {20.0, 45.0, -110.0};
    cam.look_at = {31.5, 31.5, 31.5};
    cam.width = 48;
    cam.height = 48;
    RenderSettings rs;
    rs.spp = 8;
    rs.seed = 2024;

    Image sparse = render_field(GridField(g), mc, tf, cam, rs);
    oracle::DenseFieldReader dense{&v, g.background};
    Image dense_img = render_field(dense, mc, tf, cam, rs);
    for (std::size_t i = 0; i < sparse.pixels.size(); ++i)
        ASSERT_EQ(sparse.pixels[i], dense_img.pixels[i]);
}

TEST(TraceIso, SphereHitMatchesAnalytic)
{
    // odd dims put the field center on the lattice, so the reconstruction is
    // exact along axial rays through the center
    const double radius = 24.0;
    DenseVolume v = synth_sphere({65, 65, 65}, radius);
    auto [g, report] = compress(v, CompressionParams{});
    MacrocellGrid mc = build_macrocells(g);
    Vec3d center{32.0, 32.0, 32.0};
    double surface = radius / 2.0; // field = 0.5 there

    GridField field(g);
    struct Probe {
        Vec3d origin, dir;
    };
    std::vector<Probe> rays = {
        {{-40.0, 32.0, 32.0}, {1, 0, 0}}, {{110.0, 32.0, 32.0}, {-1, 0, 0}},
        {{32.0, -50.0, 32.0}, {0, 1, 0}}, {{32.0, 32.0, 130.0}, {0, 0, -1}},
        {{32.0, 32.0, -44.0}, {0, 0, 1}},
    };
    for (const Probe& probe : rays) {
        std::optional<double> hit = trace_iso_hit(field, mc, Ray{probe.origin, probe.dir}, 0.5);
        ASSERT_TRUE(hit.has_value());

        // analytic first intersection with the R/2 sphere
        Vec3d oc = probe.origin - center;
        double b = dot(oc, probe.dir);
        double c = dot(oc, oc) - surface * surface;
        double disc = b * b - c;
        ASSERT_GT(disc, 0.0);
        double t_analytic = -b - std::sqrt(disc);
        EXPECT_NEAR(*hit, t_analytic, 0.01);
    }
}

TEST(TraceIso, IsoOutsideRangesIsBackground)
{
    DenseVolume v = synth_sphere({64, 64, 64}, 20.0);
    auto [g, report] = compress(v, CompressionParams{});
    MacrocellGrid mc = build_macrocells(g);
    RenderSettings rs;
    rs.mode = RenderMode::iso;
    rs.iso_value = 7.5; // far above every value
    rs.background_color = {0.25f, 0.5f, 0.75f};
    GridField field(g);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        Vec3d o{rng.uniform() * 120.0 - 30.0, rng.uniform() * 120.0 - 30.0, -20.0};
        Vec3d d = normalize(Vec3d{rng.uniform() - 0.5, rng.uniform() - 0.5, 1.0});
        Vec3f c = trace_iso(field, mc, Ray{o, d}, rs);
        ASSERT_EQ(c, rs.background_color);
    }
}

TEST(TraceIso, RampNormalIsRed)
{
    DenseVolume v = synth_ramp({64, 64, 64});
    auto [g, report] = compress(v, CompressionParams{});
    MacrocellGrid mc = build_macrocells(g);
    RenderSettings rs;
    rs.mode = RenderMode::iso;
    rs.iso_value = 0.5; // plane x = 31.5
    GridField field(g);

    Vec3f c = trace_iso(field, mc, Ray{{-10.0, 20.0, 20.0}, {1.0, 0.0, 0.0}}, rs);
    EXPECT_NEAR(c.x, 1.0f, 0.02f);
    EXPECT_NEAR(c.y, 0.0f, 0.02f);
    EXPECT_NEAR(c.z, 0.0f, 0.02f);
}
