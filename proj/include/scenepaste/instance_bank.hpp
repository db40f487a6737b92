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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenepaste/error.hpp"
#include "scenepaste/png_io.hpp"
#include "scenepaste/raster.hpp"
#include "scenepaste/rng.hpp"

namespace scenepaste {

// A pre-trimmed RGBA cutout: the alpha-tight bounding box of the opaque
// pixels equals the raster extent, so a target pixel height maps directly
// onto the raster height.
struct InstanceCutout {
    ImageD pixels;  // RGBA in [0,1]
    std::string category;
    double h_real_min = 0.0;  // real-world height range, meters
    double h_real_max = 0.0;
    std::string source_id;

    int width() const { return pixels.width(); }
    int height() const { return pixels.height(); }
};

// Tight box over alpha > 0; invalid box when fully transparent.
inline PixelBox alpha_tight_box(const ImageD& rgba) {
    PixelBox tight{rgba.width(), rgba.height(), 0, 0};
    for (int y = 0; y < rgba.height(); ++y) {
        for (int x = 0; x < rgba.width(); ++x) {
            if (rgba.at(x, y, 3) > 0.0) {
                tight.x1 = std::min(tight.x1, x);
                tight.y1 = std::min(tight.y1, y);
                tight.x2 = std::max(tight.x2, x + 1);
                tight.y2 = std::max(tight.y2, y + 1);
            }
        }
    }
    return tight;
}

inline ImageD crop(const ImageD& src, const PixelBox& box) {
    ImageD out(box.width(), box.height(), src.channels());
    for (int y = 0; y < box.height(); ++y)
        for (int x = 0; x < box.width(); ++x)
            for (int c = 0; c < src.channels(); ++c)
                out.at(x, y, c) = src.at(box.x1 + x, box.y1 + y, c);
    return out;
}

class Bank {
public:
    explicit Bank(std::vector<InstanceCutout> cutouts) : cutouts_(std::move(cutouts)) {
        if (cutouts_.empty())
            throw LoadError("instance bank is empty");
        for (std::size_t i = 0; i < cutouts_.size(); ++i)
            by_category_[cutouts_[i].category].push_back(i);
    }

    const std::vector<InstanceCutout>& cutouts() const { return cutouts_; }
    std::size_t size() const { return cutouts_.size(); }

    std::vector<std::string> categories() const {
        std::vector<std::string> out;
        for (const auto& [cat, idx] : by_category_)
            out.push_back(cat);
        return out;
    }

    bool has_category(const std::string& category) const {
        return by_category_.count(category) > 0;
    }

    const std::vector<std::size_t>& category_indices(const std::string& category) const {
        auto it = by_category_.find(category);
        if (it == by_category_.end())
            throw std::domain_error("unknown cutout category: " + category);
        return it->second;
    }

private:
    std::vector<InstanceCutout> cutouts_;
    std::map<std::string, std::vector<std::size_t>> by_category_;  // sorted keys
};

// Manifest rows: `<relative_path> <category> <h_real_min> <h_real_max>`.
inline Bank load_bank(const std::filesystem::path& mask_dir,
                      const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw LoadError("cannot open bank manifest " + manifest_path.string());

    std::vector<InstanceCutout> cutouts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string rel, category;
        double h_min = 0.0, h_max = 0.0;
        if (!(ls >> rel))
            continue;
        if (!(ls >> category >> h_min >> h_max))
            throw LoadError(manifest_path.string() + ":" + std::to_string(line_no) +
                            ": expected `<path> <category> <h_min> <h_max>`");
        if (!(h_min > 0.0) || !(h_min <= h_max))
            throw LoadError(manifest_path.string() + ":" + std::to_string(line_no) +
                            ": invalid height range for " + rel);

        const auto image_path = mask_dir / rel;
        ImageD rgba = load_rgba(image_path);
        const PixelBox tight = alpha_tight_box(rgba);
        if (!tight.valid())
            throw LoadError("fully transparent cutout: " + image_path.string());
        if (tight != rgba.bounds())
            rgba = crop(rgba, tight);

        cutouts.push_back(InstanceCutout{std::move(rgba), category, h_min, h_max, rel});
    }
    return Bank(std::move(cutouts));
}

// Uniform choice within one category; consumes exactly one draw.
inline const InstanceCutout& sample_cutout(const Bank& bank, const std::string& category,
                                           RandomStream& rng) {
    const auto& indices = bank.category_indices(category);
    return bank.cutouts()[indices[rng.next_below(indices.size())]];
}

// Uniform choice over the whole bank; consumes exactly one draw.
inline const InstanceCutout& sample_cutout(const Bank& bank, RandomStream& rng) {
    return bank.cutouts()[rng.next_below(bank.size())];
}

// Width that keeps the aspect ratio for a given target height.
inline std::pair<int, int> scaled_dims(const InstanceCutout& cutout, int target_height_px) {
    if (target_height_px < 1)
        throw std::domain_error("resize target height must be >= 1");
    const double factor = static_cast<double>(target_height_px) / cutout.height();
    const int w = std::max(1, round_half_up(cutout.width() * factor));
    return {w, target_height_px};
}

namespace detail {

// Separable triangle-filter resampling. The support widens with the scale
// factor on downscale so every source pixel contributes to some output
// pixel; at scale 1 the weights degenerate to an exact copy.
struct ResampleTap {
    int first = 0;
    std::vector<double> weights;
};

inline std::vector<ResampleTap> resample_taps(int src_n, int dst_n) {
    const double scale = static_cast<double>(src_n) / dst_n;
    const double filter_scale = std::max(1.0, scale);
    const double support = filter_scale;  // triangle kernel support is 1

    std::vector<ResampleTap> taps(static_cast<std::size_t>(dst_n));
    for (int i = 0; i < dst_n; ++i) {
        const double center = (i + 0.5) * scale;
        int lo = static_cast<int>(center - support + 0.5);
        int hi = static_cast<int>(center + support + 0.5);
        lo = std::max(lo, 0);
        hi = std::min(hi, src_n);

        auto& tap = taps[static_cast<std::size_t>(i)];
        tap.first = lo;
        tap.weights.resize(static_cast<std::size_t>(hi - lo));
        double sum = 0.0;
        for (int j = lo; j < hi; ++j) {
            const double t = (j + 0.5 - center) / filter_scale;
            const double w = std::max(0.0, 1.0 - std::abs(t));
            tap.weights[static_cast<std::size_t>(j - lo)] = w;
            sum += w;
        }
        for (double& w : tap.weights)
            w /= sum;
    }
    return taps;
}

}  // namespace detail

// Bilinear-family resampling of all channels with identical weights; the
// alpha channel is treated exactly like color.
inline ImageD resample(const ImageD& src, int dst_w, int dst_h) {
    const auto col_taps = detail::resample_taps(src.width(), dst_w);
    const auto row_taps = detail::resample_taps(src.height(), dst_h);
    const int ch = src.channels();

    ImageD horiz(dst_w, src.height(), ch);
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < dst_w; ++x) {
            const auto& tap = col_taps[static_cast<std::size_t>(x)];
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < tap.weights.size(); ++k)
                    acc += tap.weights[k] * src.at(tap.first + static_cast<int>(k), y, c);
                horiz.at(x, y, c) = acc;
            }
        }
    }

    ImageD out(dst_w, dst_h, ch);
    for (int y = 0; y < dst_h; ++y) {
        const auto& tap = row_taps[static_cast<std::size_t>(y)];
        for (int x = 0; x < dst_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < tap.weights.size(); ++k)
                    acc += tap.weights[k] * horiz.at(x, tap.first + static_cast<int>(k), c);
                out.at(x, y, c) = clamp01(acc);
            }
        }
    }
    return out;
}

inline InstanceCutout resize_cutout(const InstanceCutout& cutout, int target_height_px) {
    const auto [w, h] = scaled_dims(cutout, target_height_px);
    InstanceCutout out = cutout;
    if (w == cutout.width() && h == cutout.height())
        return out;
    out.pixels = resample(cutout.pixels, w, h);
    return out;
}

inline InstanceCutout hflip_cutout(const InstanceCutout& cutout) {
    InstanceCutout out = cutout;
    out.pixels = flip_horizontal(cutout.pixels);
    return out;
}

}  // namespace scenepaste
