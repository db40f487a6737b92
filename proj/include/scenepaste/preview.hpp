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

#include "scenepaste/placement.hpp"
#include "scenepaste/png_io.hpp"
#include "scenepaste/raster.hpp"

namespace scenepaste {

inline void draw_box_outline(RasterU8& image, const PixelBox& box, std::uint8_t r,
                             std::uint8_t g, std::uint8_t b) {
    auto put = [&](int x, int y) {
        if (!image.in_bounds(x, y))
            return;
        image.at(x, y, 0) = r;
        image.at(x, y, 1) = g;
        image.at(x, y, 2) = b;
    };
    for (int x = box.x1; x < box.x2; ++x) {
        put(x, box.y1);
        put(x, box.y2 - 1);
    }
    for (int y = box.y1; y < box.y2; ++y) {
        put(box.x1, y);
        put(box.x2 - 1, y);
    }
}

inline constexpr int kPreviewSeparatorWidth = 4;

// Side-by-side inspection image: original on the left, augmented result
// with drawn annotation boxes on the right, split by a gray border.
inline void emit_preview(const ImageD& original, const AugmentedSample& sample,
                         const std::filesystem::path& out_path) {
    const RasterU8 left = to_u8(original);
    RasterU8 right = to_u8(sample.image);
    for (const auto& ann : sample.annotations)
        draw_box_outline(right, ann.box, 255, 0, 0);

    const int w = left.width(), h = left.height();
    RasterU8 panel(2 * w + kPreviewSeparatorWidth, h, 3, 128);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                panel.at(x, y, c) = left.at(x, y, c);
                panel.at(w + kPreviewSeparatorWidth + x, y, c) = right.at(x, y, c);
            }
        }
    }
    write_png(out_path, panel);
}

}  // namespace scenepaste
