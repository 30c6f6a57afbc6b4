// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "svdb/errors.hpp"
#include "svdb/render.hpp"
#include "svdb/transfer.hpp"

namespace svdb {

// JSON side of the renderer interfaces.
//
// Transfer function:
//   { "domain": [lo, hi], "density_scale": s, "rgba": [[r,g,b,a], ...] }
//
// Camera and render settings (one file):
//   { "position": [x,y,z], "look_at": [x,y,z], "up": [x,y,z],
//     "fov_y": deg, "width": px, "height": px, "spp": n, "seed": n,
//     "mode": "pathtrace" | "iso", "iso_value": v,
//     "max_bounces": n, "rr_start_bounce": n,
//     "ambient": [r,g,b], "background_color": [r,g,b], "threads": n }
// Camera fields missing from the file are filled by the caller (the CLI
// frames the volume); the remaining fields default as in RenderSettings.

namespace detail {

inline nlohmann::json load_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(Errc::io_error, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::io_error, path.string() + ": " + e.what());
    }
    return j;
}

inline Vec3d json_vec3(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 3)
        fail(Errc::io_error, "expected an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace detail

inline TransferFunction load_transfer_function(const std::filesystem::path& path)
{
    nlohmann::json j = detail::load_json(path);
    try {
        auto dom = j.at("domain");
        double lo = dom.at(0).get<double>();
        double hi = dom.at(1).get<double>();
        double scale = j.value("density_scale", 1.0);
        std::vector<std::array<float, 4>> entries;
        for (const auto& e : j.at("rgba"))
            entries.push_back({e.at(0).get<float>(), e.at(1).get<float>(), e.at(2).get<float>(),
                               e.at(3).get<float>()});
        return TransferFunction(lo, hi, std::move(entries), scale);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::io_error, path.string() + ": " + e.what());
    }
}

struct SceneConfig {
    Camera camera;
    RenderSettings settings;
    bool has_position = false;
    bool has_look_at = false;
};

inline SceneConfig load_scene_config(const std::filesystem::path& path)
{
    nlohmann::json j = detail::load_json(path);
    SceneConfig sc;
    try {
        if (j.contains("position")) {
            sc.camera.position = detail::json_vec3(j["position"]);
            sc.has_position = true;
        }
        if (j.contains("look_at")) {
            sc.camera.look_at = detail::json_vec3(j["look_at"]);
            sc.has_look_at = true;
        }
        if (j.contains("up"))
            sc.camera.up = detail::json_vec3(j["up"]);
        sc.camera.fov_y_deg = j.value("fov_y", 45.0);
        sc.camera.width = j.value("width", 512);
        sc.camera.height = j.value("height", 512);
        if (sc.camera.width < 1 || sc.camera.height < 1)
            fail(Errc::io_error, "image dimensions must be positive");

        sc.settings.spp = j.value("spp", 16);
        if (sc.settings.spp < 1)
            fail(Errc::io_error, "spp must be >= 1");
        sc.settings.seed = j.value("seed", std::uint64_t(0));
        sc.settings.max_bounces = j.value("max_bounces", 64);
        sc.settings.rr_start_bounce = j.value("rr_start_bounce", 3);
        sc.settings.iso_value = j.value("iso_value", 0.5);
        std::string mode = j.value("mode", std::string("pathtrace"));
        if (mode == "pathtrace")
            sc.settings.mode = RenderMode::pathtrace;
        else if (mode == "iso")
            sc.settings.mode = RenderMode::iso;
        else
            fail(Errc::io_error, "mode must be \"pathtrace\" or \"iso\"");
        if (j.contains("ambient")) {
            Vec3d a = detail::json_vec3(j["ambient"]);
            sc.settings.ambient_radiance = Vec3f{float(a.x), float(a.y), float(a.z)};
        }
        if (j.contains("background_color")) {
            Vec3d b = detail::json_vec3(j["background_color"]);
            sc.settings.background_color = Vec3f{float(b.x), float(b.y), float(b.z)};
        }
        sc.settings.threads = j.value("threads", 0);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::io_error, path.string() + ": " + e.what());
    }
    return sc;
}

} // namespace svdb
