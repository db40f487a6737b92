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

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenepaste/camera.hpp"
#include "scenepaste/config.hpp"
#include "scenepaste/error.hpp"
#include "scenepaste/png_io.hpp"
#include "scenepaste/raster.hpp"

namespace scenepaste {

enum class PlacementReason { ok, off_freespace, over_occluded, out_of_bounds, above_horizon };

inline const char* to_string(PlacementReason reason) {
    switch (reason) {
        case PlacementReason::ok: return "ok";
        case PlacementReason::off_freespace: return "off_freespace";
        case PlacementReason::over_occluded: return "over_occluded";
        case PlacementReason::out_of_bounds: return "out_of_bounds";
        default: return "above_horizon";
    }
}

struct PlacementVerdict {
    bool accepted = false;
    PlacementReason reason = PlacementReason::ok;

    static PlacementVerdict pass() { return {true, PlacementReason::ok}; }
    static PlacementVerdict fail(PlacementReason reason) { return {false, reason}; }
};

inline constexpr std::array<std::string_view, 5> kRoadUserCategories{
    "car", "truck", "bus", "pedestrian", "bicycle"};

struct RoadUserBox {
    std::string category;
    PixelBox box;
};

// Per-background bundle of everything the placement constraints consult.
// Immutable after load; queries are read-only.
struct SceneContext {
    int width = 0;
    int height = 0;
    RasterU8 freespace;  // 0/1, image-sized
    RasterU8 lanes;      // 0 = none, k = lane instance k
    int lane_count = 0;
    std::vector<RoadUserBox> road_users;
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
    std::vector<std::string> warnings;  // graceful degradations at load
};

namespace detail {

inline std::vector<RoadUserBox> parse_roaduser_file(const std::filesystem::path& path,
                                                    int width, int height) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open road-user file " + path.string());
    std::vector<RoadUserBox> boxes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string category;
        if (!(ls >> category))
            continue;
        const std::string at = path.string() + ":" + std::to_string(line_no);
        if (std::find(kRoadUserCategories.begin(), kRoadUserCategories.end(), category) ==
            kRoadUserCategories.end())
            throw LoadError(at + ": unknown road-user category `" + category + "`");
        PixelBox box;
        if (!(ls >> box.x1 >> box.y1 >> box.x2 >> box.y2))
            throw LoadError(at + ": expected `<category> <x1> <y1> <x2> <y2>`");
        std::string rest;
        if (ls >> rest)
            throw LoadError(at + ": trailing content after box");
        if (!box.valid())
            throw LoadError(at + ": box corners must satisfy x1 < x2 and y1 < y2");
        if (box.x1 < 0 || box.y1 < 0 || box.x2 > width || box.y2 > height)
            throw LoadError(at + ": box exceeds image bounds");
        boxes.push_back(RoadUserBox{category, box});
    }
    return boxes;
}

}  // namespace detail

// Loads a context bundle against known background dimensions. A missing
// lane map or road-user file degrades to an empty one with a warning; the
// freespace mask and camera are mandatory.
inline SceneContext load_context_with_size(int width, int height,
                                           const std::filesystem::path& freespace_path,
                                           const std::filesystem::path& lanes_path,
                                           const std::filesystem::path& roadusers_path,
                                           const std::filesystem::path& camera_path) {
    SceneContext ctx;
    ctx.width = width;
    ctx.height = height;

    RasterU8 fs = load_gray(freespace_path);
    if (fs.width() != width || fs.height() != height)
        throw LoadError("freespace raster " + freespace_path.string() + " is " +
                        std::to_string(fs.width()) + "x" + std::to_string(fs.height()) +
                        " but background is " + std::to_string(width) + "x" +
                        std::to_string(height));
    ctx.freespace = RasterU8(width, height, 1);
    for (std::size_t i = 0; i < fs.data().size(); ++i)
        ctx.freespace.data()[i] = fs.data()[i] >= 128 ? 1 : 0;

    if (std::filesystem::exists(lanes_path)) {
        ctx.lanes = load_gray(lanes_path);
        if (ctx.lanes.width() != width || ctx.lanes.height() != height)
            throw LoadError("lane raster " + lanes_path.string() + " is " +
                            std::to_string(ctx.lanes.width()) + "x" +
                            std::to_string(ctx.lanes.height()) + " but background is " +
                            std::to_string(width) + "x" + std::to_string(height));
        std::set<std::uint8_t> ids(ctx.lanes.data().begin(), ctx.lanes.data().end());
        ids.erase(0);
        int expect = 1;
        for (std::uint8_t id : ids)
            if (id != expect++)
                throw LoadError("lane raster " + lanes_path.string() +
                                ": lane ids must form a contiguous set {0..K}");
        ctx.lane_count = static_cast<int>(ids.size());
    } else {
        ctx.lanes = RasterU8(width, height, 1, 0);
        ctx.lane_count = 0;
        ctx.warnings.push_back("missing lane map " + lanes_path.string() +
                               "; using empty lane map");
    }

    if (std::filesystem::exists(roadusers_path)) {
        ctx.road_users = detail::parse_roaduser_file(roadusers_path, width, height);
    } else {
        ctx.warnings.push_back("missing road-user file " + roadusers_path.string() +
                               "; using empty box list");
    }

    const Camera cam = parse_camera_file(camera_path);
    if (cam.intrinsics.cx >= width || cam.intrinsics.cy >= height)
        throw LoadError(camera_path.string() + ": principal point (" +
                        std::to_string(cam.intrinsics.cx) + "," +
                        std::to_string(cam.intrinsics.cy) + ") outside image " +
                        std::to_string(width) + "x" + std::to_string(height));
    ctx.intrinsics = cam.intrinsics;
    ctx.extrinsics = cam.extrinsics;
    return ctx;
}

inline SceneContext load_context(const std::filesystem::path& background_path,
                                 const std::filesystem::path& freespace_path,
                                 const std::filesystem::path& lanes_path,
                                 const std::filesystem::path& roadusers_path,
                                 const std::filesystem::path& camera_path) {
    const RasterU8 bg = read_png(background_path);
    return load_context_with_size(bg.width(), bg.height(), freespace_path, lanes_path,
                                  roadusers_path, camera_path);
}

// Contact rule: the contact pixel itself must be freespace, and at least
// min_fraction of the horizontal segment within halfwidth of it. Pixels off
// the image count against the fraction; out-of-bounds contacts are false.
inline bool is_on_freespace(const SceneContext& ctx, PixelPoint contact, double halfwidth,
                            double min_fraction = 0.8) {
    if (!ctx.freespace.in_bounds(contact.x, contact.y))
        return false;
    if (ctx.freespace.at(contact.x, contact.y) == 0)
        return false;
    const int lo = static_cast<int>(std::ceil(contact.x - halfwidth));
    const int hi = static_cast<int>(std::floor(contact.x + halfwidth));
    int total = 0, free_count = 0;
    for (int x = lo; x <= hi; ++x) {
        ++total;
        if (x >= 0 && x < ctx.width && ctx.freespace.at(x, contact.y) != 0)
            ++free_count;
    }
    if (total == 0)
        return true;  // degenerate segment: only the contact-pixel rule applies
    return static_cast<double>(free_count) / total >= min_fraction;
}

// Fraction of the box covered by the union of road-user boxes, by exact
// rectangle-union area (x-sweep over clipped boxes).
inline double occlusion_fraction(const SceneContext& ctx, const PixelBox& box) {
    if (!box.valid())
        throw std::domain_error("occlusion_fraction: degenerate box");
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > ctx.width || box.y2 > ctx.height)
        throw std::domain_error("occlusion_fraction: box out of image bounds");

    std::vector<PixelBox> clipped;
    for (const auto& user : ctx.road_users) {
        const PixelBox c = box.intersect(user.box);
        if (c.valid())
            clipped.push_back(c);
    }
    if (clipped.empty())
        return 0.0;

    std::vector<int> xs;
    for (const auto& c : clipped) {
        xs.push_back(c.x1);
        xs.push_back(c.x2);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::int64_t covered = 0;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
        const int xa = xs[s], xb = xs[s + 1];
        std::vector<std::pair<int, int>> spans;
        for (const auto& c : clipped)
            if (c.x1 <= xa && c.x2 >= xb)
                spans.emplace_back(c.y1, c.y2);
        if (spans.empty())
            continue;
        std::sort(spans.begin(), spans.end());
        std::int64_t len = 0;
        int cur_lo = spans[0].first, cur_hi = spans[0].second;
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first > cur_hi) {
                len += cur_hi - cur_lo;
                cur_lo = spans[i].first;
                cur_hi = spans[i].second;
            } else {
                cur_hi = std::max(cur_hi, spans[i].second);
            }
        }
        len += cur_hi - cur_lo;
        covered += static_cast<std::int64_t>(xb - xa) * len;
    }
    return static_cast<double>(covered) / static_cast<double>(box.area());
}

// All nonzero lane-map columns at a row, ascending, with their lane ids.
inline std::vector<std::pair<int, int>> lane_columns_at_row(const SceneContext& ctx, int row) {
    if (row < 0 || row >= ctx.height)
        throw std::domain_error("lane_columns_at_row: row out of range");
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < ctx.width; ++x) {
        const std::uint8_t id = ctx.lanes.at(x, row);
        if (id != 0)
            out.emplace_back(x, static_cast<int>(id));
    }
    return out;
}

// Conjunction of the positioning constraints, checked in a fixed order so
// rejection reasons are deterministic: bounds, horizon, freespace,
// occlusion.
inline PlacementVerdict validate_placement(const SceneContext& ctx, const PixelBox& box,
                                           PixelPoint contact, const PipelineConfig& cfg) {
    const int margin = cfg.bounds_margin();
    if (!box.valid() || box.x1 < margin || box.y1 < margin || box.x2 > ctx.width - margin ||
        box.y2 > ctx.height - margin)
        return PlacementVerdict::fail(PlacementReason::out_of_bounds);
    if (!(static_cast<double>(contact.y) > ctx.intrinsics.cy))
        return PlacementVerdict::fail(PlacementReason::above_horizon);
    const double halfwidth = box.width() / 2.0 * cfg.freespace_contact_scale;
    if (!is_on_freespace(ctx, contact, halfwidth, cfg.freespace_min_fraction))
        return PlacementVerdict::fail(PlacementReason::off_freespace);
    if (occlusion_fraction(ctx, box) > cfg.occlusion_max_fraction)
        return PlacementVerdict::fail(PlacementReason::over_occluded);
    return PlacementVerdict::pass();
}

}  // namespace scenepaste
