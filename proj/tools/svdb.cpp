// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: synthesize test volumes, compress raw volumes to
// SVDB, inspect and score the result, sweep quality/metric grids, render.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <svdb/scene_io.hpp>
#include <svdb/svdb.hpp>

namespace {

std::string fmt_g(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

bool parse_dims(const std::string& s, svdb::Coord& out)
{
    int w = 0, h = 0, d = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream is(s);
    if (!(is >> w >> sep1 >> h >> sep2 >> d))
        return false;
    if ((sep1 != 'x' && sep1 != 'X') || (sep2 != 'x' && sep2 != 'X'))
        return false;
    if (w < 1 || h < 1 || d < 1)
        return false;
    out = {w, h, d};
    return true;
}

bool parse_voxel_type(const std::string& s, svdb::VoxelType& out)
{
    if (s == "u8")
        out = svdb::VoxelType::u8;
    else if (s == "f32")
        out = svdb::VoxelType::f32;
    else
        return false;
    return true;
}

struct VolumeFlags {
    std::string path;
    std::string dims_text;
    std::string type_text = "f32";
};

svdb::DenseVolume load_volume(const VolumeFlags& f)
{
    svdb::Coord dims;
    if (!parse_dims(f.dims_text, dims))
        throw CLI::ValidationError("--dims", "expected WxHxD with positive integers");
    svdb::VoxelType type;
    if (!parse_voxel_type(f.type_text, type))
        throw CLI::ValidationError("--type", "expected u8 or f32");
    return svdb::DenseVolume::load_raw(f.path, dims, type);
}

bool looks_like_svdb(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    return in && std::memcmp(magic, svdb::kSvdbMagic, 4) == 0;
}

void print_report(const svdb::CompressionReport& r)
{
    std::cout << "background " << fmt_g(r.background) << "\n"
              << "num_bricks " << r.num_bricks << "\n"
              << "bricks_activated " << r.bricks_activated << "\n"
              << "voxels_activated " << r.voxels_activated << "\n"
              << "frozen_bytes " << r.frozen_bytes << "\n"
              << "dense_bytes " << r.dense_bytes << "\n"
              << "ratio " << fmt_g(r.achieved_ratio) << "\n";
}

int run(int argc, char** argv)
{
    CLI::App app{"svdb: fixed-rate sparse-voxel volume compression and rendering"};
    app.require_subcommand(1);

    // ---- compress ----
    auto* compress_cmd = app.add_subcommand("compress", "compress a raw volume to an SVDB file");
    VolumeFlags cvol;
    double quality = 1.0;
    std::string metric_text = "median";
    std::string output;
    std::string report_csv;
    int bins = 0;
    bool no_corners = false;
    compress_cmd->add_option("--input", cvol.path, "raw volume file")->required();
    compress_cmd->add_option("--dims", cvol.dims_text, "volume dims WxHxD")->required();
    compress_cmd->add_option("--type", cvol.type_text, "voxel type: u8|f32")->capture_default_str();
    compress_cmd->add_option("--quality", quality, "quality in [0,1]")->required();
    compress_cmd->add_option("--metric", metric_text, "closest|farthest|median")->capture_default_str();
    compress_cmd->add_option("--output", output, "output .svdb path")->required();
    compress_cmd->add_option("--bins", bins, "histogram bin count (0 = auto)");
    compress_cmd->add_flag("--no-corners", no_corners, "do not pin the extreme corner voxels");
    compress_cmd->add_option("--report", report_csv, "also write a one-row CSV report");
    bool most_similar_first = false;
    compress_cmd->add_flag("--most-similar-first", most_similar_first,
                           "debug: activate background-like bricks first (inverts quality)");
    compress_cmd->callback([&] {
        svdb::DenseVolume v = load_volume(cvol);
        svdb::CompressionParams params;
        params.quality = quality;
        params.histogram_bins = bins;
        params.activate_corners = !no_corners;
        params.most_similar_first = most_similar_first;
        if (!svdb::metric_from_string(metric_text, params.metric))
            throw CLI::ValidationError("--metric", "expected closest, farthest or median");
        auto [grid, report] = svdb::compress(v, params);
        svdb::write_frozen(grid, output);
        print_report(report);
        if (!report_csv.empty()) {
            std::ofstream csv(report_csv, std::ios::trunc);
            if (!csv)
                svdb::fail(svdb::Errc::io_error, "cannot open " + report_csv);
            double e = svdb::mse(grid, v);
            svdb::write_csv_header(csv);
            svdb::write_csv_row(csv, quality, svdb::to_string(params.metric), e,
                                svdb::psnr(e, double(v.max_value()) - double(v.min_value())),
                                report.frozen_bytes, report.achieved_ratio);
        }
    });

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "compare an SVDB file against its source volume");
    VolumeFlags svol;
    std::string compressed;
    stats_cmd->add_option("--original", svol.path, "raw reference volume")->required();
    stats_cmd->add_option("--dims", svol.dims_text, "reference dims WxHxD")->required();
    stats_cmd->add_option("--type", svol.type_text, "voxel type: u8|f32")->capture_default_str();
    stats_cmd->add_option("--compressed", compressed, "SVDB file")->required();
    stats_cmd->callback([&] {
        svdb::DenseVolume v = load_volume(svol);
        svdb::FrozenGrid grid = svdb::read_frozen(compressed);
        double e = svdb::mse(grid, v);
        double p = svdb::psnr(e, double(v.max_value()) - double(v.min_value()));
        svdb::SizeReport sr = svdb::size_report(grid, v);
        std::cout << "mse " << fmt_g(e) << "\n"
                  << "psnr " << fmt_g(p) << "\n"
                  << "frozen_bytes " << sr.frozen_bytes << "\n"
                  << "dense_bytes " << sr.dense_bytes << "\n"
                  << "ratio " << fmt_g(sr.ratio) << "\n";
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "compress at a grid of qualities and metrics, emit CSV");
    VolumeFlags wvol;
    std::vector<double> qualities;
    std::vector<std::string> metric_names;
    std::string csv_out;
    int sweep_bins = 0;
    sweep_cmd->add_option("--input", wvol.path, "raw volume file")->required();
    sweep_cmd->add_option("--dims", wvol.dims_text, "volume dims WxHxD")->required();
    sweep_cmd->add_option("--type", wvol.type_text, "voxel type: u8|f32")->capture_default_str();
    sweep_cmd->add_option("--qualities", qualities, "quality values")->required()->expected(1, -1);
    sweep_cmd->add_option("--metrics", metric_names, "metrics to sweep")->required()->expected(1, -1);
    sweep_cmd->add_option("--csv", csv_out, "output CSV path")->required();
    sweep_cmd->add_option("--bins", sweep_bins, "histogram bin count (0 = auto)");
    sweep_cmd->callback([&] {
        svdb::DenseVolume v = load_volume(wvol);
        std::ofstream csv(csv_out, std::ios::trunc);
        if (!csv)
            svdb::fail(svdb::Errc::io_error, "cannot open " + csv_out);
        svdb::write_csv_header(csv);
        double peak = double(v.max_value()) - double(v.min_value());
        for (const std::string& mname : metric_names) {
            svdb::CompressionParams params;
            params.histogram_bins = sweep_bins;
            if (!svdb::metric_from_string(mname, params.metric))
                throw CLI::ValidationError("--metrics", "expected closest, farthest or median");
            for (double q : qualities) {
                params.quality = q;
                auto [grid, report] = svdb::compress(v, params);
                double e = svdb::mse(grid, v);
                svdb::write_csv_row(csv, q, mname.c_str(), e, svdb::psnr(e, peak),
                                    report.frozen_bytes, report.achieved_ratio);
            }
        }
        std::cout << "wrote " << qualities.size() * metric_names.size() << " rows to " << csv_out
                  << "\n";
    });

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic raw f32 test volume");
    std::string kind;
    std::string synth_dims_text;
    std::string synth_out;
    std::uint64_t seed = 0;
    int blob_count = 8;
    double sphere_radius = 0.0;
    synth_cmd->add_option("kind", kind, "noise|blobs|ramp|sphere")->required();
    synth_cmd->add_option("--dims", synth_dims_text, "volume dims WxHxD")->required();
    synth_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "output raw file")->required();
    synth_cmd->add_option("--count", blob_count, "number of blobs")->capture_default_str();
    synth_cmd->add_option("--radius", sphere_radius, "sphere field radius in voxels (0 = auto)");
    synth_cmd->callback([&] {
        svdb::Coord dims;
        if (!parse_dims(synth_dims_text, dims))
            throw CLI::ValidationError("--dims", "expected WxHxD with positive integers");
        svdb::DenseVolume v;
        if (kind == "noise")
            v = svdb::synth_noise(dims, seed);
        else if (kind == "blobs")
            v = svdb::synth_blobs(dims, seed, blob_count);
        else if (kind == "ramp")
            v = svdb::synth_ramp(dims);
        else if (kind == "sphere")
            v = svdb::synth_sphere(dims, sphere_radius);
        else
            throw CLI::ValidationError("kind", "expected noise, blobs, ramp or sphere");
        svdb::write_raw_f32(v, synth_out);
        std::cout << "wrote " << synth_out << " (" << v.size() * 4 << " bytes)\n";
    });

    // ---- render ----
    auto* render_cmd = app.add_subcommand("render", "render an SVDB or raw volume to a PPM image");
    std::string volume_path;
    std::string rdims_text, rtype_text = "f32";
    std::string tf_path, settings_path, image_out;
    int render_threads = 0;
    render_cmd->add_option("--volume", volume_path, "SVDB file, or raw file with --dims/--type")->required();
    render_cmd->add_option("--dims", rdims_text, "raw volume dims WxHxD");
    render_cmd->add_option("--type", rtype_text, "raw voxel type: u8|f32")->capture_default_str();
    render_cmd->add_option("--tf", tf_path, "transfer function JSON")->required();
    render_cmd->add_option("--settings", settings_path, "camera/settings JSON")->required();
    render_cmd->add_option("--out", image_out, "output PPM path")->required();
    render_cmd->add_option("--threads", render_threads, "worker threads (0 = all cores)");
    render_cmd->callback([&] {
        svdb::FrozenGrid grid;
        if (looks_like_svdb(volume_path)) {
            grid = svdb::read_frozen(volume_path);
        } else {
            // raw volumes drop in by compressing losslessly first
            if (rdims_text.empty())
                throw CLI::ValidationError("--dims", "raw input needs --dims");
            VolumeFlags rf{volume_path, rdims_text, rtype_text};
            svdb::DenseVolume v = load_volume(rf);
            svdb::CompressionParams params;
            params.quality = 1.0;
            grid = svdb::compress(v, params).first;
        }
        svdb::TransferFunction tf = svdb::load_transfer_function(tf_path);
        svdb::SceneConfig sc = svdb::load_scene_config(settings_path);
        if (render_threads > 0)
            sc.settings.threads = render_threads;

        // frame the volume when the scene file has no explicit camera
        svdb::Vec3d extent{double(grid.dims.x - 1), double(grid.dims.y - 1),
                           double(grid.dims.z - 1)};
        svdb::Vec3d center = extent * 0.5;
        if (!sc.has_look_at)
            sc.camera.look_at = center;
        if (!sc.has_position)
            sc.camera.position = center + svdb::Vec3d{0.0, 0.0, -2.2 * std::max(1.0, extent.max_component())};

        svdb::Image img = svdb::render(grid, tf, sc.camera, sc.settings);
        svdb::write_ppm(img, image_out);
        std::cout << "wrote " << image_out << " (" << img.width << "x" << img.height << ", "
                  << sc.settings.spp << " spp)\n";
    });

    // ---- info ----
    auto* info_cmd = app.add_subcommand("info", "print SVDB header and node statistics");
    std::string info_path;
    VolumeFlags ivol;
    bool has_original = false;
    info_cmd->add_option("file", info_path, "SVDB file")->required();
    auto* orig_opt = info_cmd->add_option("--original", ivol.path, "raw source volume for lossless-quality estimate");
    info_cmd->add_option("--dims", ivol.dims_text, "source dims WxHxD");
    info_cmd->add_option("--type", ivol.type_text, "source voxel type")->capture_default_str();
    info_cmd->callback([&] {
        svdb::FrozenGrid g = svdb::read_frozen(info_path);
        std::cout << "version " << svdb::kSvdbVersion << "\n"
                  << "voxel_type " << svdb::to_string(g.voxel_type) << "\n"
                  << "dims " << g.dims.x << " " << g.dims.y << " " << g.dims.z << "\n"
                  << "background " << fmt_g(g.background) << "\n"
                  << "value_domain " << fmt_g(g.value_domain.first) << " "
                  << fmt_g(g.value_domain.second) << "\n"
                  << "root_entries " << g.root.size() << "\n"
                  << "upper_nodes " << g.uppers.size() << "\n"
                  << "lower_nodes " << g.lowers.size() << "\n"
                  << "leaves " << g.leaves.size() << "\n"
                  << "active_voxels " << g.active_voxel_count() << "\n"
                  << "frozen_bytes " << g.byte_size() << "\n";
        if (has_original) {
            svdb::DenseVolume v = load_volume(ivol);
            std::cout << "lossless_quality " << fmt_g(svdb::lossless_quality(v, g.background))
                      << "\n";
        }
    });
    orig_opt->each([&](const std::string&) { has_original = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const svdb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
