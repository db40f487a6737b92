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
#include <cmath>
#include <stdexcept>

#include "scenepaste/instance_bank.hpp"
#include "scenepaste/raster.hpp"

namespace scenepaste {

struct Hsv {
    double h = 0.0;  // degrees in [0, 360); 0 for gray pixels
    double s = 0.0;
    double v = 0.0;
};

// Standard hexcone conversion.
inline Hsv rgb_to_hsv(double r, double g, double b) {
    if (r < 0.0 || r > 1.0 || g < 0.0 || g > 1.0 || b < 0.0 || b > 1.0)
        throw std::domain_error("rgb_to_hsv: channels must be in [0,1]");
    const double v = std::max({r, g, b});
    const double delta = v - std::min({r, g, b});
    Hsv out;
    out.v = v;
    out.s = v > 0.0 ? delta / v : 0.0;
    if (delta > 0.0) {
        if (v == r)
            out.h = 60.0 * ((g - b) / delta);
        else if (v == g)
            out.h = 60.0 * ((b - r) / delta + 2.0);
        else
            out.h = 60.0 * ((r - g) / delta + 4.0);
        if (out.h < 0.0)
            out.h += 360.0;
        if (out.h >= 360.0)
            out.h -= 360.0;
    }
    return out;
}

inline void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b) {
    if (hsv.h < 0.0 || hsv.h >= 360.0 || hsv.s < 0.0 || hsv.s > 1.0 || hsv.v < 0.0 ||
        hsv.v > 1.0)
        throw std::domain_error("hsv_to_rgb: input out of range");
    const double c = hsv.v * hsv.s;
    const double x = c * (1.0 - std::abs(std::fmod(hsv.h / 60.0, 2.0) - 1.0));
    const double m = hsv.v - c;
    double rp = 0.0, gp = 0.0, bp = 0.0;
    switch (static_cast<int>(hsv.h / 60.0)) {
        case 0: rp = c; gp = x; break;
        case 1: rp = x; gp = c; break;
        case 2: gp = c; bp = x; break;
        case 3: gp = x; bp = c; break;
        case 4: rp = x; bp = c; break;
        default: rp = c; bp = x; break;
    }
    r = rp + m;
    g = gp + m;
    b = bp + m;
}

// Mean saturation and value of the local paste region.
struct RegionStats {
    double mean_s = 0.0;
    double mean_v = 0.0;
};

inline RegionStats region_stats(const ImageD& image, const PixelBox& box) {
    if (!box.valid())
        throw std::domain_error("region_stats: degenerate region");
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > image.width() || box.y2 > image.height())
        throw std::domain_error("region_stats: region out of bounds");
    double sum_s = 0.0, sum_v = 0.0;
    for (int y = box.y1; y < box.y2; ++y) {
        for (int x = box.x1; x < box.x2; ++x) {
            const Hsv hsv = rgb_to_hsv(image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2));
            sum_s += hsv.s;
            sum_v += hsv.v;
        }
    }
    const double n = static_cast<double>(box.area());
    return RegionStats{sum_s / n, sum_v / n};
}

// Direction of the saturation/value scale. match_region multiplies the
// cutout toward the region means (region/instance); instance_over_region
// keeps the instance/region ratio instead.
enum class HsvScaleDirection { match_region, instance_over_region };

struct HsvAdaptConfig {
    double scale_min = 0.5;
    double scale_max = 2.0;
    HsvScaleDirection direction = HsvScaleDirection::match_region;
};

struct HsvAdaptInfo {
    double s_scale = 1.0;
    double v_scale = 1.0;
    bool s_skipped = false;  // zero-mean channel, scaling skipped
    bool v_skipped = false;
};

// Scales the opaque pixels' saturation and value so the cutout means track
// the region means. Hue and alpha are untouched.
inline InstanceCutout adapt_cutout_hsv(const InstanceCutout& cutout, const RegionStats& stats,
                                       const HsvAdaptConfig& cfg,
                                       HsvAdaptInfo* info_out = nullptr) {
    double sum_s = 0.0, sum_v = 0.0;
    std::int64_t opaque = 0;
    const ImageD& px = cutout.pixels;
    for (int y = 0; y < px.height(); ++y) {
        for (int x = 0; x < px.width(); ++x) {
            if (px.at(x, y, 3) <= 0.0)
                continue;
            const Hsv hsv = rgb_to_hsv(px.at(x, y, 0), px.at(x, y, 1), px.at(x, y, 2));
            sum_s += hsv.s;
            sum_v += hsv.v;
            ++opaque;
        }
    }
    if (opaque == 0)
        throw std::domain_error("adapt_cutout_hsv: cutout has no opaque pixels");
    const double mean_s = sum_s / static_cast<double>(opaque);
    const double mean_v = sum_v / static_cast<double>(opaque);

    HsvAdaptInfo info;
    auto scale_for = [&](double instance_mean, double region_mean, bool& skipped) {
        const double denom =
            cfg.direction == HsvScaleDirection::match_region ? instance_mean : region_mean;
        const double numer =
            cfg.direction == HsvScaleDirection::match_region ? region_mean : instance_mean;
        if (denom <= 0.0) {
            skipped = true;
            return 1.0;
        }
        return std::clamp(numer / denom, cfg.scale_min, cfg.scale_max);
    };
    info.s_scale = scale_for(mean_s, stats.mean_s, info.s_skipped);
    info.v_scale = scale_for(mean_v, stats.mean_v, info.v_skipped);

    InstanceCutout out = cutout;
    for (int y = 0; y < px.height(); ++y) {
        for (int x = 0; x < px.width(); ++x) {
            if (px.at(x, y, 3) <= 0.0)
                continue;
            Hsv hsv = rgb_to_hsv(px.at(x, y, 0), px.at(x, y, 1), px.at(x, y, 2));
            hsv.s = clamp01(hsv.s * info.s_scale);
            hsv.v = clamp01(hsv.v * info.v_scale);
            double r, g, b;
            hsv_to_rgb(hsv, r, g, b);
            out.pixels.at(x, y, 0) = clamp01(r);
            out.pixels.at(x, y, 1) = clamp01(g);
            out.pixels.at(x, y, 2) = clamp01(b);
        }
    }
    if (info_out)
        *info_out = info;
    return out;
}

}  // namespace scenepaste
