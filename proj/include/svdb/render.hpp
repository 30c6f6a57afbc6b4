// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "svdb/dda.hpp"
#include "svdb/errors.hpp"
#include "svdb/frozen.hpp"
#include "svdb/macrocell.hpp"
#include "svdb/parallel.hpp"
#include "svdb/rng.hpp"
#include "svdb/sample.hpp"
#include "svdb/transfer.hpp"
#include "svdb/vec.hpp"

namespace svdb {

struct Camera {
    Vec3d position{0, 0, 0};
    Vec3d look_at{0, 0, 1};
    Vec3d up{0, 1, 0};
    double fov_y_deg = 45.0;
    int width = 512;
    int height = 512;
};

enum class RenderMode {
    pathtrace,
    iso,
};

struct RenderSettings {
    int spp = 16;
    int max_bounces = 64;
    int rr_start_bounce = 3;
    std::uint64_t seed = 0;
    RenderMode mode = RenderMode::pathtrace;
    double iso_value = 0.5;
    Vec3f ambient_radiance{1.0f, 1.0f, 1.0f};
    Vec3f background_color{0.0f, 0.0f, 0.0f};
    int threads = 0; // 0 = hardware concurrency
};

/// Linear-light image; tonemapping happens at PPM export.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Vec3f> pixels;

    const Vec3f& at(int x, int y) const { return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
};

inline void write_ppm(const Image& img, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        fail(Errc::io_error, "cannot open " + path.string() + " for writing");
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(std::size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Vec3f& c = img.at(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                double v = std::clamp(double(c[ch]), 0.0, 1.0);
                v = std::pow(v, 1.0 / 2.2); // gamma
                row[std::size_t(x) * 3 + std::size_t(ch)] =
                    (unsigned char)(std::lround(v * 255.0));
            }
        }
        os.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!os)
        fail(Errc::io_error, "write failed for " + path.string());
}

/// Lattice reader over a frozen grid; copy one per worker thread (a copy
/// starts with a cold accessor cache, which never changes values).
struct GridField {
    const FrozenGrid* grid;
    Accessor acc;

    explicit GridField(const FrozenGrid& g) : grid(&g), acc(g) {}
    GridField(const GridField& o) : grid(o.grid), acc(*o.grid) {}

    float operator()(const Coord& c) const { return acc.read(c); }
};

struct WoodcockEvent {
    double t = 0.0;
    float value = 0.0f;
};

/// Delta tracking inside one majorant interval: advance
/// t <- t - ln(1-u)/sigma_maj and accept with probability sigma_t/sigma_maj,
/// where sigma_t = density_scale * alpha(TF(trilinear sample)). Returns
/// nothing when the tentative step leaves [t0, t1]. Draws no random numbers
/// when the majorant is zero, so skipping empty cells does not shift the
/// stream.
template <typename Field>
inline std::optional<WoodcockEvent> woodcock_track(const Field& field, const TransferFunction& tf,
                                                   double sigma_maj, const Ray& ray, double t0,
                                                   double t1, Rng& rng)
{
    if (!(sigma_maj > 0.0))
        return std::nullopt;
    double inv_maj = 1.0 / sigma_maj;
    double t = t0;
    for (;;) {
        t -= std::log(1.0 - rng.uniform()) * inv_maj;
        if (t >= t1)
            return std::nullopt;
        float v = sample_trilinear(field, ray.at(t));
        double sigma_t = tf.extinction(v);
        if (rng.uniform() < sigma_t * inv_maj)
            return WoodcockEvent{t, v};
    }
}

namespace detail {

inline Vec3d sample_isotropic(Rng& rng)
{
    double z = 1.0 - 2.0 * rng.uniform();
    double phi = 2.0 * 3.14159265358979323846 * rng.uniform();
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

/// Next scattering event along the ray, or nothing if it leaves the grid.
template <typename Field>
inline std::optional<WoodcockEvent> next_event(const Field& field, const MacrocellGrid& mc,
                                               const TransferFunction& tf, const Ray& ray, Rng& rng)
{
    std::optional<WoodcockEvent> event;
    dda_traverse(mc, ray, 0.0, std::numeric_limits<double>::infinity(),
                 [&](const Vec3i& cell, double ta, double tb) {
                     std::size_t ci = mc.cell_index(cell);
                     if (mc.empty[ci])
                         return true;
                     event = woodcock_track(field, tf, double(mc.majorant[ci]), ray, ta, tb, rng);
                     return !event.has_value();
                 });
    return event;
}

} // namespace detail

/// Single path: volumetric scattering with Woodcock-tracked free flights,
/// isotropic phase, RGB albedo from the transfer function, Russian roulette
/// after rr_start_bounce (survival = max throughput component clamped to
/// [0.05, 0.95]), ambient radiance picked up on escape, hard cutoff at
/// max_bounces.
template <typename Field>
inline Vec3f trace_path(const Field& field, const MacrocellGrid& mc, const TransferFunction& tf,
                        Ray ray, const RenderSettings& settings, Rng& rng)
{
    Vec3d throughput{1.0, 1.0, 1.0};
    int bounces = 0;
    for (;;) {
        std::optional<WoodcockEvent> event = detail::next_event(field, mc, tf, ray, rng);
        if (!event) {
            return Vec3f{float(throughput.x * settings.ambient_radiance.x),
                         float(throughput.y * settings.ambient_radiance.y),
                         float(throughput.z * settings.ambient_radiance.z)};
        }
        if (++bounces > settings.max_bounces)
            return Vec3f{0.0f, 0.0f, 0.0f};

        Vec3f albedo = tf.rgb(event->value);
        throughput *= Vec3d{double(albedo.x), double(albedo.y), double(albedo.z)};
        ray = Ray{ray.at(event->t), detail::sample_isotropic(rng)};

        if (bounces >= settings.rr_start_bounce) {
            double survive = std::clamp(throughput.max_component(), 0.05, 0.95);
            if (rng.uniform() >= survive)
                return Vec3f{0.0f, 0.0f, 0.0f};
            throughput /= survive;
        }
    }
}

/// Interval ISO-surface march: skip macrocells whose range excludes the iso
/// value, sample every 0.25 voxel inside candidate cells, refine each sign
/// change with 16 bisection steps. Returns the hit distance, if any.
template <typename Field>
inline std::optional<double> trace_iso_hit(const Field& field, const MacrocellGrid& mc,
                                           const Ray& ray, double iso)
{
    constexpr double step = 0.25;

    std::optional<double> hit_t;
    dda_traverse(mc, ray, 0.0, std::numeric_limits<double>::infinity(),
                 [&](const Vec3i& cell, double ta, double tb) {
                     std::size_t ci = mc.cell_index(cell);
                     if (iso < mc.cell_min[ci] || iso > mc.cell_max[ci])
                         return true;
                     double t_prev = ta;
                     double f_prev = double(sample_trilinear(field, ray.at(t_prev))) - iso;
                     if (f_prev == 0.0) {
                         hit_t = t_prev;
                         return false;
                     }
                     for (double t = ta + step;; t += step) {
                         t = std::min(t, tb);
                         double f = double(sample_trilinear(field, ray.at(t))) - iso;
                         if (f == 0.0 || (f_prev < 0.0) != (f < 0.0)) {
                             double a = t_prev, b = t;
                             for (int i = 0; i < 16; ++i) {
                                 double m = 0.5 * (a + b);
                                 double fm = double(sample_trilinear(field, ray.at(m))) - iso;
                                 if (fm == 0.0) {
                                     a = b = m;
                                     break;
                                 }
                                 if ((f_prev < 0.0) == (fm < 0.0))
                                     a = m;
                                 else
                                     b = m;
                             }
                             hit_t = 0.5 * (a + b);
                             return false;
                         }
                         t_prev = t;
                         f_prev = f;
                         if (t >= tb)
                             return true;
                     }
                 });
    return hit_t;
}

/// ISO shading: absolute value of the unit surface normal mapped to RGB;
/// misses return the background color.
template <typename Field>
inline Vec3f trace_iso(const Field& field, const MacrocellGrid& mc, const Ray& ray,
                       const RenderSettings& settings)
{
    std::optional<double> hit_t = trace_iso_hit(field, mc, ray, settings.iso_value);
    if (!hit_t)
        return settings.background_color;

    Vec3d n = sample_gradient(field, ray.at(*hit_t));
    double len = length(n);
    if (len == 0.0)
        return Vec3f{0.0f, 0.0f, 0.0f};
    n /= len;
    return Vec3f{float(std::abs(n.x)), float(std::abs(n.y)), float(std::abs(n.z))};
}

namespace detail {

inline Ray camera_ray(const Camera& cam, double px, double py)
{
    Vec3d forward = normalize(cam.look_at - cam.position);
    Vec3d right = normalize(cross(forward, cam.up));
    Vec3d up = cross(right, forward);
    double tan_half = std::tan(cam.fov_y_deg * 3.14159265358979323846 / 360.0);
    double aspect = double(cam.width) / double(cam.height);
    double ndc_x = (2.0 * px / double(cam.width) - 1.0) * tan_half * aspect;
    double ndc_y = (1.0 - 2.0 * py / double(cam.height)) * tan_half;
    return Ray{cam.position, normalize(forward + right * ndc_x + up * ndc_y)};
}

} // namespace detail

/// Renders spp samples per pixel into a linear image. The per-sample RNG is
/// keyed on (seed, pixel, sample index), and samples accumulate per pixel in
/// index order, so the result is byte-identical for any worker count.
template <typename Field>
inline Image render_field(const Field& field, const MacrocellGrid& mc, const TransferFunction& tf,
                          const Camera& cam, const RenderSettings& settings)
{
    Image img;
    img.width = cam.width;
    img.height = cam.height;
    img.pixels.assign(std::size_t(cam.width) * std::size_t(cam.height), Vec3f{0, 0, 0});

    constexpr int tile = 16;
    int tiles_x = (cam.width + tile - 1) / tile;
    int tiles_y = (cam.height + tile - 1) / tile;

    parallel_for(
        std::int64_t(tiles_x) * tiles_y,
        [&](std::int64_t t) {
            Field local(field); // per-thread accessor cache
            int tx = int(t % tiles_x) * tile;
            int ty = int(t / tiles_x) * tile;
            for (int y = ty; y < std::min(ty + tile, cam.height); ++y)
                for (int x = tx; x < std::min(tx + tile, cam.width); ++x) {
                    Vec3d accum{0, 0, 0};
                    for (int s = 0; s < settings.spp; ++s) {
                        Rng rng = Rng::for_pixel_sample(settings.seed, x, y, s);
                        double jx = rng.uniform();
                        double jy = rng.uniform();
                        Ray ray = detail::camera_ray(cam, x + jx, y + jy);
                        Vec3f c = settings.mode == RenderMode::pathtrace
                                      ? trace_path(local, mc, tf, ray, settings, rng)
                                      : trace_iso(local, mc, ray, settings);
                        accum += Vec3d{double(c.x), double(c.y), double(c.z)};
                    }
                    accum /= double(settings.spp);
                    img.pixels[std::size_t(y) * std::size_t(cam.width) + std::size_t(x)] =
                        Vec3f{float(accum.x), float(accum.y), float(accum.z)};
                }
        },
        settings.threads);
    return img;
}

/// Convenience entry point used by the CLI: builds macrocells and majorants
/// for the grid, renders, and optionally writes a PPM.
inline Image render(const FrozenGrid& grid, const TransferFunction& tf, const Camera& cam,
                    const RenderSettings& settings)
{
    MacrocellGrid mc = build_macrocells(grid);
    update_majorants(mc, tf);
    return render_field(GridField(grid), mc, tf, cam, settings);
}

} // namespace svdb
