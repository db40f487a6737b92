// Copyright 2026 The scenepaste Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scenepaste/camera.hpp"
#include "scenepaste/instance_bank.hpp"
#include "scenepaste/png_io.hpp"
#include "scenepaste/raster.hpp"
#include "scenepaste/rng.hpp"
#include "scenepaste/scene_context.hpp"

namespace fixtures {

using namespace scenepaste;

inline double hash_noise(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    const std::uint64_t h = RandomStream::mix(RandomStream::mix(a, b), c);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Deterministic synthetic traffic scene: gradient sky over a textured road.
inline ImageD make_background(int width, int height, int variant) {
    ImageD img(width, height, 3);
    const double horizon = height / 2.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double r, g, b;
            if (y < horizon) {
                const double t = y / horizon;
                r = 0.30 + 0.25 * t + 0.03 * variant;
                g = 0.45 + 0.20 * t;
                b = 0.70 + 0.10 * t - 0.04 * variant;
            } else {
                const double t = (y - horizon) / (height - horizon);
                const double noise =
                    0.05 * (hash_noise(static_cast<std::uint64_t>(variant), x, y) - 0.5);
                r = g = b = 0.30 + 0.22 * t + noise;
                // painted center strip
                if (std::abs(x - width / 2) < width / 200 + 1 && (y / 8) % 2 == 0)
                    r = g = b = 0.85;
            }
            img.at(x, y, 0) = clamp01(r);
            img.at(x, y, 1) = clamp01(g);
            img.at(x, y, 2) = clamp01(b);
        }
    }
    return img;
}

// Drivable trapezoid widening toward the bottom edge.
inline RasterU8 make_freespace(int width, int height, double cy, bool full_rows = false) {
    RasterU8 mask(width, height, 1, 0);
    const int top = static_cast<int>(cy) + 8;
    for (int y = top; y < height; ++y) {
        if (full_rows) {
            for (int x = 0; x < width; ++x)
                mask.at(x, y) = 255;
            continue;
        }
        const double t = static_cast<double>(y - top) / std::max(1, height - top);
        const double halfw = (0.18 + 0.32 * t) * width;
        const int lo = std::max(0, static_cast<int>(width / 2.0 - halfw));
        const int hi = std::min(width, static_cast<int>(width / 2.0 + halfw));
        for (int x = lo; x < hi; ++x)
            mask.at(x, y) = 255;
    }
    return mask;
}

// Two lane lines converging on the principal point, ids 1 and 2.
inline RasterU8 make_lanes(int width, int height, double cx, double cy) {
    RasterU8 lanes(width, height, 1, 0);
    const int top = static_cast<int>(cy) + 12;
    const double offsets[2] = {-0.22, 0.22};
    for (int lane = 0; lane < 2; ++lane) {
        const double x_bottom = cx + offsets[lane] * width;
        for (int y = top; y < height; ++y) {
            const double t = (y - cy) / (height - cy);
            const double x = cx + (x_bottom - cx) * t;
            for (int dx = -1; dx <= 1; ++dx) {
                const int xi = static_cast<int>(x) + dx;
                if (xi >= 0 && xi < width)
                    lanes.at(xi, y) = static_cast<std::uint8_t>(lane + 1);
            }
        }
    }
    return lanes;
}

// Cone-shaped RGBA cutout: trapezoid silhouette, colored body, white band.
// Binary alpha, alpha-tight by construction.
inline ImageD make_cone_rgba(int width, int height, double hue_deg, double sat, double val) {
    ImageD img(width, height, 4, 0.0);
    for (int y = 0; y < height; ++y) {
        const double t = (y + 0.5) / height;
        const double halfw = std::max(0.75, (0.10 + 0.40 * t) * width);
        for (int x = 0; x < width; ++x) {
            const double dx = std::abs(x + 0.5 - width / 2.0);
            if (dx > halfw)
                continue;
            Hsv hsv;
            if (t > 0.38 && t < 0.58) {
                hsv = Hsv{0.0, 0.04, 0.93};  // reflective band
            } else if (t > 0.92) {
                hsv = Hsv{hue_deg, sat, val * 0.55};  // base plate
            } else {
                hsv = Hsv{hue_deg, sat, val};
            }
            double r, g, b;
            hsv_to_rgb(hsv, r, g, b);
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
            img.at(x, y, 3) = 1.0;
        }
    }
    // guarantee tightness at the extreme columns
    img.at(0, height - 1, 3) = 1.0;
    img.at(width - 1, height - 1, 3) = 1.0;
    for (int c = 0; c < 3; ++c) {
        img.at(0, height - 1, c) = img.at(1, height - 1, c);
        img.at(width - 1, height - 1, c) = img.at(width - 2, height - 1, c);
    }
    return img;
}

inline InstanceCutout make_cone_cutout(int width, int height, double hue_deg = 20.0,
                                       double sat = 0.85, double val = 0.9,
                                       const std::string& id = "test_cone",
                                       double h_min = 0.45, double h_max = 0.9) {
    return InstanceCutout{make_cone_rgba(width, height, hue_deg, sat, val), "cone", h_min,
                          h_max, id};
}

struct ContextSpec {
    int width = 640;
    int height = 360;
    double fx = 500.0;
    double fy = 500.0;
    double cx = 320.0;
    double cy = 180.0;
    double cam_height = 1.5;
    bool freespace_full_rows = true;   // every pixel below the horizon band
    bool with_lanes = true;
    bool empty_freespace = false;
    std::vector<RoadUserBox> road_users;
};

// In-memory context for unit tests, no files involved.
inline SceneContext build_context(const ContextSpec& spec) {
    SceneContext ctx;
    ctx.width = spec.width;
    ctx.height = spec.height;
    ctx.intrinsics = CameraIntrinsics{spec.fx, spec.fy, spec.cx, spec.cy};
    ctx.extrinsics = CameraExtrinsics{spec.cam_height};

    const RasterU8 fs = spec.empty_freespace
                            ? RasterU8(spec.width, spec.height, 1, 0)
                            : make_freespace(spec.width, spec.height, spec.cy,
                                             spec.freespace_full_rows);
    ctx.freespace = RasterU8(spec.width, spec.height, 1);
    for (std::size_t i = 0; i < fs.data().size(); ++i)
        ctx.freespace.data()[i] = fs.data()[i] >= 128 ? 1 : 0;

    if (spec.with_lanes) {
        ctx.lanes = make_lanes(spec.width, spec.height, spec.cx, spec.cy);
        ctx.lane_count = 2;
    } else {
        ctx.lanes = RasterU8(spec.width, spec.height, 1, 0);
        ctx.lane_count = 0;
    }
    ctx.road_users = spec.road_users;
    return ctx;
}

struct FixtureSet {
    std::filesystem::path root;
    std::filesystem::path backgrounds_dir;
    std::filesystem::path context_dir;
    std::filesystem::path masks_dir;
    std::filesystem::path manifest_path;
    std::filesystem::path camera_path;
    int width = 0;
    int height = 0;
    int n_backgrounds = 0;
};

// On-disk fixture bundle set for runner/CLI tests: backgrounds, context
// rasters, road users, camera, and a small cone bank.
inline FixtureSet write_fixture_set(const std::filesystem::path& root, int width = 640,
                                    int height = 360, int n_backgrounds = 3,
                                    int n_masks = 6) {
    namespace fs = std::filesystem;
    FixtureSet set;
    set.root = root;
    set.backgrounds_dir = root / "backgrounds";
    set.context_dir = root / "context";
    set.masks_dir = root / "masks";
    set.manifest_path = root / "masks" / "manifest.txt";
    set.camera_path = root / "camera.txt";
    set.width = width;
    set.height = height;
    set.n_backgrounds = n_backgrounds;

    fs::create_directories(set.backgrounds_dir);
    fs::create_directories(set.context_dir);
    fs::create_directories(set.masks_dir);

    const double fx = width * 0.78125;  // 1280 -> 1000
    const double fy = fx;
    const double cx = width / 2.0;
    const double cy = height / 2.0;
    {
        std::ofstream cam(set.camera_path);
        cam << "# synthetic fixture camera\n"
            << "fx = " << fx << "\n"
            << "fy = " << fy << "\n"
            << "cx = " << cx << "\n"
            << "cy = " << cy << "\n"
            << "cam_height = 1.5\n";
    }

    for (int i = 0; i < n_backgrounds; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "bg_%03d", i);
        write_png(set.backgrounds_dir / (std::string(name) + ".png"),
                  to_u8(make_background(width, height, i)));
        write_png(set.context_dir / (std::string(name) + ".freespace.png"),
                  make_freespace(width, height, cy, /*full_rows=*/i == 0));
        write_png(set.context_dir / (std::string(name) + ".lanes.png"),
                  make_lanes(width, height, cx, cy));
        if (i != 2) {  // bundle 2 exercises the missing-file warning path
            std::ofstream users(set.context_dir / (std::string(name) + ".roadusers.txt"));
            users << "# fixture road users\n";
            if (i == 1) {
                const int y1 = static_cast<int>(cy) + height / 8;
                users << "car " << width / 8 << " " << y1 << " " << width / 8 + width / 6
                      << " " << y1 + height / 6 << "\n";
            }
        }
    }

    std::ofstream manifest(set.manifest_path);
    manifest << "# fixture cone bank\n";
    for (int k = 0; k < n_masks; ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "cone_%02d.png", k);
        const int w = 40 + 8 * k;
        const int h = 2 * w;
        const double hue = 14.0 + 5.0 * k;
        write_png(set.masks_dir / name,
                  to_u8(make_cone_rgba(w, h, hue, 0.78 + 0.02 * k, 0.82 + 0.02 * k)));
        manifest << name << " cone 0.45 0.9\n";
    }
    return set;
}

inline bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb)
        return false;
    std::string da((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string db((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    return da == db;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Scratch directory unique per test site, wiped on creation.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("scenepaste_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
